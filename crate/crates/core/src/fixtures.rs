//! Reference sessions used in tests, examples and the CLI smoke tests.

use crate::session_log::{RawEvent, SessionLog};

/// Source, MT and expected post-edited text of the customer-service email example.
pub const EXAMPLE_SOURCE: [&str; 4] = [
    "Hey there,",
    "Some agents do speak Spanish, otherwise our system will translate :)",
    "Best,",
    "<Name>",
];

pub const EXAMPLE_MT: [&str; 4] = [
    "Bonjour,",
    "Certains agents parlent espagnol, sinon notre système se traduira par :)",
    "Cordialement,",
    "<Name>",
];

pub const EXAMPLE_PE: [&str; 4] = [
    "Bonjour,",
    "Certains agents parlent espagnol, sinon notre système traduit :)",
    "Cordialement,",
    "<Name>",
];

pub const EXAMPLE_ACTIONS: &str =
    "W:23 JSF:1 JF:8 D:se W:2 MC:1 MS:1 JF:1 D:par W:7 MC:1 MS:1 JB:1 R:traduit W:2 MS:1 S:--";

fn char_offset(haystack: &str, needle: &str) -> usize {
    let byte = haystack.find(needle).expect("needle present");
    haystack[..byte].chars().count()
}

/// Keystroke log of the example: delete "se", select and delete "par", select
/// "traduira" and type "traduit", then one last selection before stopping.
pub fn example_session() -> SessionLog {
    let mut doc = EXAMPLE_MT.join("\n");
    let mut events = Vec::new();

    let se = char_offset(&doc, " se ") + 1;
    for t in [23_000, 23_150, 23_300] {
        events.push(RawEvent::delete(t, se, 1));
    }
    doc = doc.replacen(" se ", " ", 1);

    let par = char_offset(&doc, "par ");
    events.push(RawEvent::click(24_100, par));
    events.push(RawEvent::select(24_600, par, 4));
    events.push(RawEvent::delete(25_000, par, 4));
    doc = doc.replacen("par ", "", 1);

    let verb = char_offset(&doc, "traduira");
    events.push(RawEvent::click(31_000, verb));
    events.push(RawEvent::select(31_500, verb, 8));
    events.push(RawEvent::delete(32_000, verb, 8));
    let mut t = 32_150;
    for (j, c) in "traduit".chars().enumerate() {
        events.push(RawEvent::insert(t, verb + j, c.to_string()));
        t += 150;
    }
    events.push(RawEvent::select(33_500, 0, 8));

    SessionLog {
        doc_id: "example-1".into(),
        editor_id: "editor-1".into(),
        lang_pair: "en-fr".into(),
        source_segments: EXAMPLE_SOURCE.iter().map(|s| s.to_string()).collect(),
        mt_segments: EXAMPLE_MT.iter().map(|s| s.to_string()).collect(),
        events,
        end_t: 34_000,
    }
}
