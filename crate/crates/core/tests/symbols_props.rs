use std::collections::{HashMap, HashSet};

use actseq::actions::{parse_sequence, Action, ActionRecord, ActionType, Lexeme};
use actseq::fixtures::EXAMPLE_ACTIONS;
use actseq::symbols::{anonymize, bin_value, build_vocab, symbolize, BinKind, SymbolId, Vocabulary};
use proptest::prelude::*;

fn footnote_edges(kind: BinKind) -> Vec<u64> {
    let mut e: Vec<u64> = (0..=5).collect();
    match kind {
        BinKind::Wait | BinKind::WordJump => e.extend([7, 10, 15, 20, 30, 50, 75, 100, 150, 200]),
        BinKind::SentenceJump | BinKind::Mouse => e.extend([7, 10]),
    }
    e
}

const KINDS: [BinKind; 4] = [BinKind::Wait, BinKind::WordJump, BinKind::SentenceJump, BinKind::Mouse];

#[test]
fn bin_value_matches_interval_rule_up_to_1000() {
    for kind in KINDS {
        let edges = footnote_edges(kind);
        let last = edges.len() - 1;
        let mut prev = 0;
        for v in 0..=1000u64 {
            // bin i holds (edges[i-1], edges[i]]; everything past the top edge is open
            let want = edges.iter().filter(|&&e| e < v).count().min(last);
            let b = bin_value(kind, v);
            assert_eq!(b.index, want, "{kind:?} {v}");
            assert_eq!(b.edge, edges[want]);
            assert_eq!(b.open, want == last);
            assert!(b.index >= prev);
            prev = b.index;
        }
    }
}

#[test]
fn bin_labels() {
    assert_eq!(bin_value(BinKind::Wait, 0).to_string(), "0");
    assert_eq!(bin_value(BinKind::Wait, 23).to_string(), "30");
    assert_eq!(bin_value(BinKind::Wait, 200).to_string(), "200+");
    assert_eq!(bin_value(BinKind::Mouse, 12).to_string(), "10+");
    assert_eq!(bin_value(BinKind::SentenceJump, 6).to_string(), "7");
}

fn fifty_words() -> Vec<String> {
    (0..50).map(|i| format!("w{i:02}")).collect()
}

#[test]
fn symbol_table_is_a_336_bijection() {
    let v = Vocabulary::from_words(fifty_words());
    assert_eq!(v.size(), 336);
    let mut seen = HashSet::new();
    for i in 0..v.size() as u32 {
        let s = v.decode(SymbolId(i)).unwrap();
        assert!(seen.insert(s), "duplicate {s:?}");
        assert_eq!(v.encode(&s), Some(SymbolId(i)));
    }
    assert!(v.decode(SymbolId(336)).is_err());
    for t in ActionType::ALL {
        let n = v.symbols().iter().filter(|s| s.kind == t).count();
        let want = match t {
            t if t.is_edit() => 51,
            ActionType::W | ActionType::JF | ActionType::JB => 16,
            ActionType::S => 1,
            _ => 8,
        };
        assert_eq!(n, want, "{t}");
    }
}

#[test]
fn small_vocab_size() {
    let seq = parse_sequence("R:a I:b D:c R:a S", false).unwrap();
    let v = build_vocab([&seq[..]], 50).unwrap();
    assert_eq!(v.words().len(), 3);
    assert_eq!(v.size(), 5 * 4 + 48 + 32 + 1);
}

#[test]
fn reference_sequence_decodes_to_its_types() {
    let seq = parse_sequence(EXAMPLE_ACTIONS, false).unwrap();
    let v = build_vocab([&seq[..]], 50).unwrap();
    let ids = symbolize(&seq, &v);
    assert_eq!(ids.len(), 17);
    let kinds: Vec<ActionType> = ids.iter().map(|&i| v.decode(i).unwrap().kind).collect();
    assert_eq!(kinds, seq.iter().map(Action::kind).collect::<Vec<_>>());
    assert_eq!(v.label(&v.decode(ids[0]).unwrap()), "W:30");
    assert_eq!(v.label(&v.decode(ids[3]).unwrap()), "D:se");
}

fn word() -> impl Strategy<Value = String> {
    (0..80usize).prop_map(|i| format!("w{i:02}"))
}

fn action() -> impl Strategy<Value = Action> {
    prop_oneof![
        word().prop_map(|w| Action::Replace(Lexeme::Word(w))),
        word().prop_map(|w| Action::Insert(Lexeme::Word(w))),
        word().prop_map(|w| Action::Delete(Lexeme::Word(w))),
        (word(), word()).prop_map(|(a, b)| Action::InsertBlock(Lexeme::Word(format!("{a} {b}")))),
        word().prop_map(|w| Action::DeleteBlock(Lexeme::Word(w))),
        (1..400u32).prop_map(Action::JumpForward),
        (1..400u32).prop_map(Action::JumpBack),
        (1..20u32).prop_map(Action::JumpSentenceForward),
        (1..20u32).prop_map(Action::JumpSentenceBack),
        (1..20u32).prop_map(Action::MouseClicks),
        (1..20u32).prop_map(Action::MouseSelections),
        (0..1000u64).prop_map(Action::Wait),
    ]
}

fn sequence() -> impl Strategy<Value = Vec<Action>> {
    prop::collection::vec(action(), 0..30).prop_map(|mut v| {
        v.push(Action::Stop);
        v
    })
}

fn record(editor: usize, actions: Vec<Action>) -> ActionRecord {
    ActionRecord {
        editor_id: format!("ed{editor}"),
        doc_id: "d".into(),
        lang_pair: "en-fr".into(),
        actions,
    }
}

/// Kept iff fewer than `max` words beat it on (count desc, word asc).
fn brute_force_kept(corpus: &[Vec<Action>], max: usize) -> Vec<String> {
    let mut counts: HashMap<String, usize> = HashMap::new();
    for seq in corpus {
        for a in seq {
            if let Some(Lexeme::Word(w)) = a.lexeme() {
                *counts.entry(w.clone()).or_default() += 1;
            }
        }
    }
    let beats = |a: (&String, &usize), b: (&String, &usize)| a.1 > b.1 || (a.1 == b.1 && a.0 < b.0);
    let mut kept: Vec<(usize, String)> = counts
        .iter()
        .filter_map(|w| {
            let better = counts.iter().filter(|o| beats(*o, w)).count();
            (better < max).then(|| (better, w.0.clone()))
        })
        .collect();
    kept.sort();
    kept.into_iter().map(|(_, w)| w).collect()
}

proptest! {
    #[test]
    fn symbolize_preserves_length_and_types(seq in sequence(), corpus in prop::collection::vec(sequence(), 1..5)) {
        let v = build_vocab(corpus.iter().map(Vec::as_slice), 50).unwrap();
        let ids = symbolize(&seq, &v);
        prop_assert_eq!(ids.len(), seq.len());
        for (id, a) in ids.iter().zip(&seq) {
            prop_assert_eq!(v.decode(*id).unwrap().kind, a.kind());
        }
    }

    #[test]
    fn vocabulary_keeps_top_words_with_lexicographic_ties(corpus in prop::collection::vec(sequence(), 1..12), max in 1..60usize) {
        let v = build_vocab(corpus.iter().map(Vec::as_slice), max).unwrap();
        prop_assert_eq!(v.words().to_vec(), brute_force_kept(&corpus, max));
    }

    #[test]
    fn anonymize_is_idempotent_and_keeps_symbols(seqs in prop::collection::vec((0..4usize, sequence()), 1..8)) {
        let corpus: Vec<ActionRecord> = seqs.into_iter().map(|(e, s)| record(e, s)).collect();
        let v = build_vocab(corpus.iter().map(|r| r.actions.as_slice()), 20).unwrap();
        let once = anonymize(&corpus, &v);
        prop_assert_eq!(&anonymize(&once, &v), &once);
        for (a, b) in corpus.iter().zip(&once) {
            prop_assert_eq!(symbolize(&a.actions, &v), symbolize(&b.actions, &v));
            let ids: HashSet<&str> = once.iter().map(|r| r.editor_id.as_str()).collect();
            prop_assert!(b.editor_id.parse::<usize>().unwrap() < ids.len());
        }
        // round trip through the anonymized text format
        for r in &once {
            prop_assert_eq!(&ActionRecord::parse_line(&r.to_line(), true).unwrap(), r);
        }
    }
}

#[test]
fn anonymize_assigns_editors_in_first_appearance_order() {
    let seq = parse_sequence("D:se S", false).unwrap();
    let corpus = vec![record(7, seq.clone()), record(3, seq.clone()), record(7, seq)];
    let v = Vocabulary::from_words(vec!["x".into(), "se".into()]);
    let out = anonymize(&corpus, &v);
    let ids: Vec<&str> = out.iter().map(|r| r.editor_id.as_str()).collect();
    assert_eq!(ids, ["0", "1", "0"]);
    assert_eq!(out[0].actions[0].to_token(), "D:1");
}
