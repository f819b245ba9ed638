//! Hangul syllable <-> compatibility jamo conversion.
//!
//! Syllables in U+AC00..=U+D7A3 are laid out arithmetically:
//! `index = (lead * 21 + vowel) * 28 + tail`. Decomposition renders each
//! position in the compatibility jamo block (U+3131..=U+3163), where a
//! consonant has the same code point whether it opens or closes a syllable.

use thiserror::Error;

use crate::markers::SPACE_MARKER;

const SYLLABLE_BASE: u32 = 0xAC00;
const SYLLABLE_LAST: u32 = 0xD7A3;
const VOWEL_COUNT: u32 = 21;
const TAIL_COUNT: u32 = 28;

/// Number of precomposed modern syllables.
pub const SYLLABLE_COUNT: u32 = 11_172;

/// The 19 modern leading consonants, in syllable-index order.
pub const LEADS: [char; 19] = [
    'ㄱ', 'ㄲ', 'ㄴ', 'ㄷ', 'ㄸ', 'ㄹ', 'ㅁ', 'ㅂ', 'ㅃ', 'ㅅ', 'ㅆ', 'ㅇ', 'ㅈ', 'ㅉ', 'ㅊ', 'ㅋ',
    'ㅌ', 'ㅍ', 'ㅎ',
];

/// The 21 modern vowels, in syllable-index order (contiguous U+314F..=U+3163).
pub const VOWELS: [char; 21] = [
    'ㅏ', 'ㅐ', 'ㅑ', 'ㅒ', 'ㅓ', 'ㅔ', 'ㅕ', 'ㅖ', 'ㅗ', 'ㅘ', 'ㅙ', 'ㅚ', 'ㅛ', 'ㅜ', 'ㅝ', 'ㅞ',
    'ㅟ', 'ㅠ', 'ㅡ', 'ㅢ', 'ㅣ',
];

/// The 27 modern trailing consonants; tail index `i` maps to `TAILS[i - 1]`.
pub const TAILS: [char; 27] = [
    'ㄱ', 'ㄲ', 'ㄳ', 'ㄴ', 'ㄵ', 'ㄶ', 'ㄷ', 'ㄹ', 'ㄺ', 'ㄻ', 'ㄼ', 'ㄽ', 'ㄾ', 'ㄿ', 'ㅀ', 'ㅁ',
    'ㅂ', 'ㅄ', 'ㅅ', 'ㅆ', 'ㅇ', 'ㅈ', 'ㅊ', 'ㅋ', 'ㅌ', 'ㅍ', 'ㅎ',
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HangulError {
    #[error("'{0}' (U+{code:04X}) is not a precomposed Hangul syllable", code = *.0 as u32)]
    NotSyllable(char),
    #[error("'{ch}' is not a modern {position} jamo")]
    InvalidJamo { ch: char, position: JamoPosition },
    #[error("cannot recompose jamo stream at offset {offset}: {reason}")]
    Stream { offset: usize, reason: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JamoPosition {
    Lead,
    Vowel,
    Tail,
}

impl std::fmt::Display for JamoPosition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            JamoPosition::Lead => "lead",
            JamoPosition::Vowel => "vowel",
            JamoPosition::Tail => "tail",
        })
    }
}

/// Lead consonant, vowel and optional tail of one syllable, as compatibility jamo.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct JamoTriple {
    pub lead: char,
    pub vowel: char,
    pub tail: Option<char>,
}

impl JamoTriple {
    pub fn new(lead: char, vowel: char, tail: Option<char>) -> Self {
        JamoTriple { lead, vowel, tail }
    }

    /// Jamo in reading order: lead, vowel, then the tail if present.
    pub fn iter(&self) -> impl Iterator<Item = char> {
        [Some(self.lead), Some(self.vowel), self.tail]
            .into_iter()
            .flatten()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharClass {
    HangulSyllable,
    Jamo,
    Whitespace,
    Other,
}

/// Total classification of a scalar value. `Jamo` covers every Hangul jamo
/// block (conjoining, compatibility and the extended blocks), modern or not.
pub fn classify(ch: char) -> CharClass {
    match ch as u32 {
        SYLLABLE_BASE..=SYLLABLE_LAST => CharClass::HangulSyllable,
        0x1100..=0x11FF | 0x3131..=0x318E | 0xA960..=0xA97F | 0xD7B0..=0xD7FF => CharClass::Jamo,
        _ if ch.is_whitespace() => CharClass::Whitespace,
        _ => CharClass::Other,
    }
}

pub fn is_syllable(ch: char) -> bool {
    (SYLLABLE_BASE..=SYLLABLE_LAST).contains(&(ch as u32))
}

pub fn is_modern_vowel(ch: char) -> bool {
    ('ㅏ'..='ㅣ').contains(&ch)
}

/// True for the 30 modern compatibility consonants (U+3131..=U+314E).
pub fn is_modern_consonant(ch: char) -> bool {
    ('ㄱ'..='ㅎ').contains(&ch)
}

fn lead_index(ch: char) -> Option<u32> {
    LEADS.iter().position(|&c| c == ch).map(|i| i as u32)
}

fn vowel_index(ch: char) -> Option<u32> {
    is_modern_vowel(ch).then(|| ch as u32 - 'ㅏ' as u32)
}

fn tail_index(ch: char) -> Option<u32> {
    TAILS.iter().position(|&c| c == ch).map(|i| i as u32 + 1)
}

pub fn is_lead(ch: char) -> bool {
    lead_index(ch).is_some()
}

pub fn is_tail(ch: char) -> bool {
    tail_index(ch).is_some()
}

pub fn decompose_syllable(ch: char) -> Result<JamoTriple, HangulError> {
    if !is_syllable(ch) {
        return Err(HangulError::NotSyllable(ch));
    }
    let index = ch as u32 - SYLLABLE_BASE;
    let lead = LEADS[(index / (VOWEL_COUNT * TAIL_COUNT)) as usize];
    let vowel = VOWELS[((index % (VOWEL_COUNT * TAIL_COUNT)) / TAIL_COUNT) as usize];
    let tail = match index % TAIL_COUNT {
        0 => None,
        t => Some(TAILS[t as usize - 1]),
    };
    Ok(JamoTriple { lead, vowel, tail })
}

pub fn compose_syllable(triple: JamoTriple) -> Result<char, HangulError> {
    let lead = lead_index(triple.lead).ok_or(HangulError::InvalidJamo {
        ch: triple.lead,
        position: JamoPosition::Lead,
    })?;
    let vowel = vowel_index(triple.vowel).ok_or(HangulError::InvalidJamo {
        ch: triple.vowel,
        position: JamoPosition::Vowel,
    })?;
    let tail = match triple.tail {
        None => 0,
        Some(t) => tail_index(t).ok_or(HangulError::InvalidJamo {
            ch: t,
            position: JamoPosition::Tail,
        })?,
    };
    let code = SYLLABLE_BASE + (lead * VOWEL_COUNT + vowel) * TAIL_COUNT + tail;
    // The arithmetic stays inside the syllable block for valid indices.
    Ok(char::from_u32(code).expect("syllable block code point"))
}

/// Recombine a stream of compatibility jamo into syllables.
///
/// A consonant opens a new syllable when a vowel follows it, otherwise it
/// closes the syllable before it. `⭑` becomes a space; any other character
/// passes through. Offsets in errors are char offsets into `stream`.
pub fn compose_jamo_stream(stream: &str) -> Result<String, HangulError> {
    let chars: Vec<char> = stream.chars().collect();
    let mut out = String::with_capacity(stream.len());
    let mut open: Option<JamoTriple> = None;

    let flush = |open: &mut Option<JamoTriple>, out: &mut String| -> Result<(), HangulError> {
        if let Some(triple) = open.take() {
            out.push(compose_syllable(triple)?);
        }
        Ok(())
    };

    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        if is_modern_consonant(ch) {
            let next_is_vowel = chars.get(i + 1).is_some_and(|&c| is_modern_vowel(c));
            if next_is_vowel {
                if !is_lead(ch) {
                    return Err(HangulError::Stream {
                        offset: i,
                        reason: "consonant cannot open a syllable",
                    });
                }
                flush(&mut open, &mut out)?;
                open = Some(JamoTriple::new(ch, chars[i + 1], None));
                i += 2;
                continue;
            }
            match open.as_mut() {
                Some(triple) if triple.tail.is_none() && is_tail(ch) => {
                    triple.tail = Some(ch);
                    flush(&mut open, &mut out)?;
                }
                Some(triple) if triple.tail.is_none() => {
                    return Err(HangulError::Stream {
                        offset: i,
                        reason: "consonant cannot close a syllable",
                    });
                }
                _ => {
                    return Err(HangulError::Stream {
                        offset: i,
                        reason: "consonant has no syllable to attach to",
                    });
                }
            }
        } else if is_modern_vowel(ch) {
            return Err(HangulError::Stream {
                offset: i,
                reason: "vowel without a preceding lead consonant",
            });
        } else if classify(ch) == CharClass::Jamo {
            return Err(HangulError::Stream {
                offset: i,
                reason: "archaic or positional jamo",
            });
        } else {
            flush(&mut open, &mut out)?;
            out.push(if ch == SPACE_MARKER { ' ' } else { ch });
        }
        i += 1;
    }
    flush(&mut open, &mut out)?;
    Ok(out)
}
