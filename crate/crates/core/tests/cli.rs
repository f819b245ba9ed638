mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hantok::desk::{DeskConfig, DeskCorpus};
use hantok::StrategyKind;

fn hantok(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hantok"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = hantok(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Model directory holding the six-strategy fixture components.
fn write_fixture_model(dir: &Path, kind: StrategyKind) {
    fs::create_dir_all(dir).unwrap();
    let morph = if kind.needs_morph() {
        r#""dictionary""#
    } else {
        "null"
    };
    fs::write(
        dir.join("config.json"),
        format!(
            r#"{{"strategy":"{}","vocab_size":100,"morph":{morph}}}"#,
            kind.name()
        ),
    )
    .unwrap();
    let model = match kind {
        StrategyKind::Subword => Some(common::example_subword_model()),
        StrategyKind::MorphemeAwareSubword => Some(common::example_morpheme_subword_model()),
        _ => None,
    };
    if let Some(model) = model {
        model.save(dir).unwrap();
    }
    fs::write(dir.join("morph.dict"), "나\n랑\n쇼핑\n하\n자\n.\n").unwrap();
}

#[test]
fn golden_sentence_through_the_binary() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in.txt");
    fs::write(&input, format!("{}\n", common::EXAMPLE_SENTENCE)).unwrap();
    let rows = [
        (
            StrategyKind::Cv,
            "ㄴ ㅏ ㄹ ㅏ ㅇ ⭑ ㅅ ㅛ ㅍ ㅣ ㅇ ㅎ ㅏ ㅈ ㅏ .",
        ),
        (StrategyKind::Syllable, "나 랑 ⭑ 쇼 핑 하 자 ."),
        (StrategyKind::Morpheme, "나 랑 ⭑ 쇼핑 하 자 ."),
        (StrategyKind::Subword, "▁나랑 ▁쇼 핑하 자 ."),
        (
            StrategyKind::MorphemeAwareSubword,
            "▁나 ▁랑 ⭑ ▁쇼 핑 ▁하 ▁자 ▁.",
        ),
        (StrategyKind::Word, "나랑 쇼핑하자 ."),
    ];
    for (kind, row) in rows {
        let model = tmp.path().join(kind.name());
        write_fixture_model(&model, kind);
        let tokens = tmp.path().join(format!("{}.tok", kind.name()));
        ok(&[
            "encode",
            "--model",
            s(&model),
            "--input",
            s(&input),
            "--output",
            s(&tokens),
        ]);
        assert_eq!(
            fs::read_to_string(&tokens).unwrap(),
            format!("{row}\n"),
            "{kind}"
        );
        if kind.is_reversible() {
            let decoded = ok(&["decode", "--strategy", kind.name(), "--input", s(&tokens)]);
            assert_eq!(decoded, format!("{}\n", common::EXAMPLE_SENTENCE));
        }
    }
}

#[test]
fn empty_input_gives_empty_output() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("empty.txt");
    fs::write(&input, "").unwrap();
    let model = tmp.path().join("m");
    write_fixture_model(&model, StrategyKind::Syllable);
    let out = tmp.path().join("out.tok");
    ok(&[
        "encode",
        "--model",
        s(&model),
        "--input",
        s(&input),
        "--output",
        s(&out),
    ]);
    assert_eq!(fs::read(&out).unwrap(), b"");
    ok(&[
        "decode",
        "--strategy",
        "cv",
        "--input",
        s(&input),
        "--output",
        s(&out),
    ]);
    assert_eq!(fs::read(&out).unwrap(), b"");
}

#[test]
fn thousand_line_round_trip() {
    let corpus = DeskCorpus::generate(DeskConfig {
        sentences: 1_000,
        stems: 500,
        ..DeskConfig::default()
    });
    let tmp = tempfile::tempdir().unwrap();
    let text = tmp.path().join("corpus.txt");
    let dict = tmp.path().join("dict.txt");
    fs::write(&text, corpus.sentences.join("\n") + "\n").unwrap();
    let mut buf = Vec::new();
    corpus.dictionary.write_to(&mut buf).unwrap();
    fs::write(&dict, buf).unwrap();

    for kind in StrategyKind::ALL.into_iter().filter(|k| k.is_reversible()) {
        let model = tmp.path().join(kind.name());
        let mut args = vec!["train", "--strategy", kind.name(), "--vocab-size", "800"];
        args.extend(["--input", s(&text), "--model", s(&model)]);
        if kind.needs_morph() {
            args.extend(["--morph-dict", s(&dict)]);
        }
        ok(&args);
        let tokens = tmp.path().join("tokens.txt");
        let back = tmp.path().join("back.txt");
        ok(&[
            "encode",
            "--model",
            s(&model),
            "--input",
            s(&text),
            "--output",
            s(&tokens),
        ]);
        ok(&[
            "decode",
            "--model",
            s(&model),
            "--input",
            s(&tokens),
            "--output",
            s(&back),
        ]);
        assert_eq!(fs::read(&back).unwrap(), fs::read(&text).unwrap(), "{kind}");
    }
}

#[test]
fn train_reports_merges_or_tokens() {
    let tmp = tempfile::tempdir().unwrap();
    let text = tmp.path().join("t.txt");
    fs::write(&text, "가나 가나 가다\n나가 가나다\n").unwrap();
    let model = tmp.path().join("sub");
    let out = ok(&[
        "train",
        "--strategy",
        "subword",
        "--vocab-size",
        "12",
        "--input",
        s(&text),
        "--model",
        s(&model),
    ]);
    assert!(
        out.contains("pieces:") && out.contains("top merges:"),
        "{out}"
    );
    for file in ["config.json", "vocab.tsv", "merges.txt", "pieces.tsv"] {
        assert!(model.join(file).exists(), "{file}");
    }

    let model = tmp.path().join("syl");
    let out = ok(&[
        "train",
        "--strategy",
        "syllable",
        "--vocab-size",
        "64000",
        "--input",
        s(&text),
        "--model",
        s(&model),
    ]);
    assert!(out.contains("top tokens:"), "{out}");
    assert!(!model.join("merges.txt").exists());
}

#[test]
fn stats_report_has_every_metric() {
    let corpus = DeskCorpus::generate(DeskConfig {
        sentences: 300,
        stems: 300,
        ..DeskConfig::default()
    });
    let (train, _, test) = corpus.split(98, 1);
    let tmp = tempfile::tempdir().unwrap();
    let (train_p, test_p, dict) = (
        tmp.path().join("train"),
        tmp.path().join("test"),
        tmp.path().join("dict"),
    );
    fs::write(&train_p, train.join("\n")).unwrap();
    fs::write(&test_p, test.join("\n")).unwrap();
    let mut buf = Vec::new();
    corpus.dictionary.write_to(&mut buf).unwrap();
    fs::write(&dict, buf).unwrap();

    let mut spans = Vec::new();
    for kind in ["subword", "morpheme-subword"] {
        let model = tmp.path().join(kind);
        ok(&[
            "train",
            "--strategy",
            kind,
            "--vocab-size",
            "400",
            "--input",
            s(&train_p),
            "--model",
            s(&model),
            "--morph-dict",
            s(&dict),
        ]);
        let report = tmp.path().join(format!("{kind}.json"));
        let csv = tmp.path().join(format!("{kind}.csv"));
        ok(&[
            "stats",
            "--model",
            s(&model),
            "--input",
            s(&test_p),
            "--report",
            s(&report),
            "--curve-csv",
            s(&csv),
        ]);
        let json: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
        for key in [
            "oov_rate",
            "avg_len",
            "avg_syllables_per_token",
            "boundary_spanning",
            "under_trained_curve",
        ] {
            assert!(!json[key].is_null(), "{kind}: {key} missing");
        }
        assert_eq!(json["under_trained_curve"].as_array().unwrap().len(), 101);
        assert!(fs::read_to_string(&csv)
            .unwrap()
            .starts_with("n,percentage\n"));
        spans.push(json["boundary_spanning"]["count"].as_u64().unwrap());
    }
    assert_eq!(spans[1], 0);
}

#[test]
fn configuration_errors_exit_with_2() {
    let tmp = tempfile::tempdir().unwrap();
    let text = tmp.path().join("t.txt");
    fs::write(&text, "가나다라 마바사\n").unwrap();

    // missing vocabulary file
    let model = tmp.path().join("m");
    write_fixture_model(&model, StrategyKind::Syllable);
    let out = hantok(&["stats", "--model", s(&model), "--input", s(&text)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("vocab.tsv"));

    // budget below the number of distinct characters
    let out = hantok(&[
        "train",
        "--strategy",
        "subword",
        "--vocab-size",
        "8",
        "--input",
        s(&text),
        "--model",
        s(&tmp.path().join("x")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("distinct base characters"), "{err}");

    // morpheme strategy without an analyzer
    let out = hantok(&[
        "train",
        "--strategy",
        "morpheme",
        "--vocab-size",
        "100",
        "--input",
        s(&text),
        "--model",
        s(&tmp.path().join("y")),
    ]);
    assert_eq!(out.status.code(), Some(2));

    // usage errors
    assert_eq!(
        hantok(&["train", "--strategy", "bogus"]).status.code(),
        Some(2)
    );
    let out = hantok(&[
        "encode",
        "--model",
        s(&model),
        "--input",
        s(&text),
        "--morph-dict",
        "a",
        "--wakati",
        "b",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn data_errors_exit_with_1() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.tok");
    fs::write(&bad, "⭑ 가\n").unwrap();
    let out = hantok(&["decode", "--strategy", "syllable", "--input", s(&bad)]);
    assert_eq!(out.status.code(), Some(1));

    let text = tmp.path().join("marked.txt");
    fs::write(&text, "가 ▁나\n").unwrap();
    let model = tmp.path().join("m");
    write_fixture_model(&model, StrategyKind::Cv);
    let out = hantok(&["encode", "--model", s(&model), "--input", s(&text)]);
    assert_eq!(out.status.code(), Some(1));
}
