use std::collections::BTreeMap;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::StanceExample;

/// Entity type that is never masked.
pub const LAW: &str = "LAW";

/// Half-open character range `[start, end)` tagged with an entity type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EntitySpan {
    pub start: usize,
    pub end: usize,
    pub entity_type: String,
}

/// One line of a span file; `record_index` is the 0-based position of the
/// example in the dataset file the spans refer to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanRecord {
    pub case_id: String,
    pub record_index: usize,
    pub start: usize,
    pub end: usize,
    pub entity_type: String,
}

fn check_spans(text_len: usize, spans: &[EntitySpan]) -> Result<Vec<&EntitySpan>> {
    let mut sorted: Vec<&EntitySpan> = spans.iter().collect();
    sorted.sort();
    for s in &sorted {
        if s.start >= s.end || s.end > text_len {
            return Err(Error::invalid(format!(
                "span [{}, {}) invalid for text of {text_len} characters",
                s.start, s.end
            )));
        }
        if s.entity_type.is_empty() || s.entity_type.chars().any(char::is_whitespace) {
            return Err(Error::invalid(format!("bad entity type {:?}", s.entity_type)));
        }
    }
    for w in sorted.windows(2) {
        if w[1].start < w[0].end {
            return Err(Error::invalid(format!(
                "overlapping spans [{}, {}) and [{}, {})",
                w[0].start, w[0].end, w[1].start, w[1].end
            )));
        }
    }
    Ok(sorted)
}

/// Replaces every whitespace token touching a non-LAW span with `[TYPE]`.
///
/// Whitespace is kept verbatim, so the token count never changes. A token
/// that also touches a LAW span is left alone.
pub fn ner_mask(text: &str, spans: &[EntitySpan]) -> Result<String> {
    let chars: Vec<char> = text.chars().collect();
    let sorted = check_spans(chars.len(), spans)?;
    if sorted.is_empty() {
        return Ok(text.to_string());
    }
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            out.push(chars[i]);
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && !chars[i].is_whitespace() {
            i += 1;
        }
        let touching = sorted.iter().filter(|s| s.start < i && s.end > start);
        let mut replacement = None;
        let mut law = false;
        for s in touching {
            if s.entity_type == LAW {
                law = true;
            } else if replacement.is_none() {
                replacement = Some(&s.entity_type);
            }
        }
        match replacement {
            Some(t) if !law => {
                out.push('[');
                out.push_str(t);
                out.push(']');
            }
            _ => out.extend(&chars[start..i]),
        }
    }
    Ok(out)
}

/// Produces entity spans for a text.
pub trait EntityTagger: Sync {
    fn tag(&self, text: &str) -> Vec<EntitySpan>;
}

const MONTHS: &str = "January|February|March|April|June|July|August|September|October|November|December";

static LAW_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\b(?:[A-Z][a-z]+\s+)+(?:Act|Amendment|Clause|Code)\b|\bthe Constitution\b|\b\d+\s+U\.S\.C\.(?:\s+§+\s*\d+\w*)?").unwrap()
});
static DATE_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(&format!(
        r"\b(?:(?:{MONTHS})(?:\s+\d{{1,2}}(?:st|nd|rd|th)?)?|May\s+\d{{1,2}}(?:st|nd|rd|th)?)(?:,?\s+\d{{4}})?\b"
    ))
    .unwrap()
});
static PERSON_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\b(?:Chief Justice|Justice|Judge|Mr\.|Mrs\.|Ms\.|Dr\.|General)\s+([A-Z][a-z]+(?:\s+[A-Z][a-z]+)*)").unwrap()
});
static PARTY_RE: LazyLock<Regex> = LazyLock::new(|| {
    let side = r"[A-Z][\w&'.-]*(?:\s+[A-Z][\w&'.-]*)*";
    Regex::new(&format!(r"({side})\s+v\.\s+({side})")).unwrap()
});

/// Regex tagger for dates, honorific-led names, case parties and laws.
///
/// Earlier patterns win: LAW, then DATE, PERSON and ORG (parties).
#[derive(Debug, Clone, Copy, Default)]
pub struct GazetteerTagger;

impl EntityTagger for GazetteerTagger {
    fn tag(&self, text: &str) -> Vec<EntitySpan> {
        let mut bytes: Vec<(usize, usize, &str)> = Vec::new();
        let mut accept = |s: usize, e: usize, t: &'static str| {
            if s < e && !bytes.iter().any(|(bs, be, _)| s < *be && e > *bs) {
                bytes.push((s, e, t));
            }
        };
        for m in LAW_RE.find_iter(text) {
            accept(m.start(), m.end(), LAW);
        }
        for m in DATE_RE.find_iter(text) {
            accept(m.start(), m.end(), "DATE");
        }
        for c in PERSON_RE.captures_iter(text) {
            let m = c.get(1).expect("name group");
            accept(m.start(), m.end(), "PERSON");
        }
        for c in PARTY_RE.captures_iter(text) {
            for g in [1, 2] {
                let m = c.get(g).expect("party group");
                accept(m.start(), m.end(), "ORG");
            }
        }
        let char_at = |b: usize| text[..b].chars().count();
        let mut spans: Vec<EntitySpan> = bytes
            .into_iter()
            .map(|(s, e, t)| EntitySpan {
                start: char_at(s),
                end: char_at(e),
                entity_type: t.to_string(),
            })
            .collect();
        spans.sort();
        spans
    }
}

/// Groups span-file records by the example they refer to, checking that
/// each record's case id matches that example.
pub fn spans_by_record(records: &[SpanRecord], examples: &[StanceExample]) -> Result<BTreeMap<usize, Vec<EntitySpan>>> {
    let mut out: BTreeMap<usize, Vec<EntitySpan>> = BTreeMap::new();
    for r in records {
        let ex = examples.get(r.record_index).ok_or_else(|| {
            Error::invalid(format!(
                "span record_index {} beyond {} examples",
                r.record_index,
                examples.len()
            ))
        })?;
        if ex.case_id != r.case_id {
            return Err(Error::invalid(format!(
                "span for record {} names case {} but the example is from {}",
                r.record_index, r.case_id, ex.case_id
            )));
        }
        out.entry(r.record_index).or_default().push(EntitySpan {
            start: r.start,
            end: r.end,
            entity_type: r.entity_type.clone(),
        });
    }
    Ok(out)
}

/// Masks the opinion text of every example and marks it masked. Spans come
/// from `spans` when given for an index, otherwise from `tagger`.
pub fn mask_examples(
    examples: &[StanceExample],
    spans: &BTreeMap<usize, Vec<EntitySpan>>,
    tagger: Option<&dyn EntityTagger>,
) -> Result<Vec<StanceExample>> {
    use rayon::prelude::*;
    examples
        .par_iter()
        .enumerate()
        .map(|(i, ex)| {
            let text = match (spans.get(&i), tagger) {
                (Some(s), _) => ner_mask(&ex.text, s),
                (None, Some(t)) => ner_mask(&ex.text, &t.tag(&ex.text)),
                (None, None) => Ok(ex.text.clone()),
            }
            .map_err(|e| Error::invalid(format!("record {i}: {e}")))?;
            Ok(StanceExample {
                text,
                masked: true,
                ..ex.clone()
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn span(start: usize, end: usize, t: &str) -> EntitySpan {
        EntitySpan {
            start,
            end,
            entity_type: t.into(),
        }
    }

    #[test]
    fn date_footnote_example() {
        assert_eq!(ner_mask("October 10", &[span(0, 10, "DATE")]).unwrap(), "[DATE] [DATE]");
    }

    #[test]
    fn no_spans_and_law_spans_leave_text() {
        assert_eq!(ner_mask("a  b\tc", &[]).unwrap(), "a  b\tc");
        assert_eq!(ner_mask("the Sherman Act", &[span(4, 15, LAW)]).unwrap(), "the Sherman Act");
    }

    #[test]
    fn partial_token_overlap_masks_whole_token() {
        assert_eq!(ner_mask("see Smith's brief", &[span(4, 9, "PERSON")]).unwrap(), "see [PERSON] brief");
    }

    #[test]
    fn invalid_spans() {
        assert!(ner_mask("abc def", &[span(0, 3, "X"), span(2, 5, "Y")]).is_err());
        assert!(ner_mask("abc", &[span(1, 9, "X")]).is_err());
        assert!(ner_mask("abc", &[span(1, 1, "X")]).is_err());
        assert!(ner_mask("abc", &[span(0, 1, "A B")]).is_err());
    }

    #[test]
    fn tagger_finds_common_entities() {
        let text = "On October 10, 1990 Justice Scalia cited Roe v. Wade and the Sherman Act.";
        let spans = GazetteerTagger.tag(text);
        let masked = ner_mask(text, &spans).unwrap();
        assert_eq!(
            masked,
            "On [DATE] [DATE] [DATE] Justice [PERSON] cited [ORG] v. [ORG] and the Sherman Act."
        );
        let again = GazetteerTagger.tag(&masked);
        assert!(again.iter().all(|s| s.entity_type == LAW), "{again:?}");
    }

    #[test]
    fn tagger_offsets_are_characters() {
        let text = "Café — October 3";
        let spans = GazetteerTagger.tag(text);
        assert_eq!(spans, vec![span(7, 16, "DATE")]);
    }

    #[test]
    fn span_records_must_match_cases() {
        let ex = super::super::augment::tests::examples(2, 2);
        let ok = SpanRecord {
            case_id: "c1".into(),
            record_index: 1,
            start: 0,
            end: 4,
            entity_type: "X".into(),
        };
        assert_eq!(spans_by_record(std::slice::from_ref(&ok), &ex).unwrap()[&1].len(), 1);
        let wrong = SpanRecord {
            case_id: "c0".into(),
            ..ok.clone()
        };
        assert!(spans_by_record(&[wrong], &ex).is_err());
        let far = SpanRecord { record_index: 9, ..ok };
        assert!(spans_by_record(&[far], &ex).is_err());
    }

    fn text_and_spans() -> impl Strategy<Value = (String, Vec<EntitySpan>)> {
        prop::collection::vec(("[a-zA-Zé.,]{1,6}", prop::sample::select(vec![" ", "  ", "\t", "\n"])), 1..20)
            .prop_flat_map(|parts| {
                let text: String = parts.iter().map(|(w, s)| format!("{w}{s}")).collect();
                let n = text.chars().count();
                let cuts = prop::collection::btree_set(0..=n, 0..10);
                let types = prop::collection::vec(prop::sample::select(vec!["DATE", "PERSON", LAW]), 10);
                (Just(text), cuts, types)
            })
            .prop_map(|(text, cuts, types)| {
                let cuts: Vec<usize> = cuts.into_iter().collect();
                let spans = cuts
                    .chunks_exact(2)
                    .zip(types)
                    .map(|(c, t)| span(c[0], c[1], t))
                    .collect();
                (text, spans)
            })
    }

    proptest! {
        #[test]
        fn token_count_preserved((text, spans) in text_and_spans()) {
            let out = ner_mask(&text, &spans).unwrap();
            prop_assert_eq!(out.split_whitespace().count(), text.split_whitespace().count());
            prop_assert_eq!(ner_mask(&out, &[]).unwrap(), out.clone());
        }
    }
}
