use helpsys_core::pos_mapper::{answer, answer_tokens, Lexicons, PosOutcome};
use helpsys_core::textnorm::{normalize, NormConfig};
use proptest::prelude::*;

const ACTIONS: &str = include_str!("../data/actions.tsv");
const AUX: &str = include_str!("../data/auxiliaries.tsv");
const SKILLS: &str = include_str!("../data/skills.tsv");
const TABLE: &str = include_str!("../data/action_skill.tsv");

#[test]
fn bluetooth_connect_maps_to_its_response() {
    let norm = NormConfig::default();
    let r = answer("How to connect via bluetooth?", &Lexicons::shipped(), &norm);
    assert_eq!(r.action.as_deref(), Some("connect"));
    assert_eq!(r.skill.as_deref(), Some("bluetooth"));
    assert_eq!(r.response_id.as_deref(), Some("connect_bluetooth"));
    assert_eq!(r.outcome, PosOutcome::Mapped);
}

#[test]
fn unlisted_phrasal_verb_leaves_action_empty() {
    let norm = NormConfig::default();
    let r = answer("Can you hook up via bluetooth?", &Lexicons::shipped(), &norm);
    assert_eq!(r.action, None);
    assert_eq!(r.skill.as_deref(), Some("bluetooth"));
    assert_eq!(r.response_id, None);
    assert_eq!(r.outcome, PosOutcome::MissingAction);
}

#[test]
fn unlisted_verb_sync_is_not_an_action() {
    let norm = NormConfig::default();
    let r = answer("Tell me the steps to sync my smart tv.", &Lexicons::shipped(), &norm);
    assert_eq!(r.action, None);
    assert_eq!(r.skill.as_deref(), Some("tv"));
    assert_eq!(r.response_id, None);
}

#[test]
fn generic_help_has_no_skill() {
    let norm = NormConfig::default();
    let r = answer("What can you do?", &Lexicons::shipped(), &norm);
    assert_eq!(r.skill, None);
    assert_eq!(r.response_id, None);
}

#[test]
fn adding_hook_up_closes_the_gap() {
    let norm = NormConfig::default();
    let extended = format!("{ACTIONS}hook up\tconnect\n");
    let lex = Lexicons::from_sources(&extended, AUX, SKILLS, TABLE, &norm).unwrap();
    let r = answer("Can you hook up via bluetooth?", &lex, &norm);
    assert_eq!(r.response_id.as_deref(), Some("connect_bluetooth"));
}

#[test]
fn padding_is_ignored() {
    let norm = NormConfig::default();
    let lex = Lexicons::shipped();
    let padded = normalize("how do i set an alarm", &norm);
    assert_eq!(answer_tokens(&padded.tokens, &lex), answer("how do i set an alarm", &lex, &norm));
}

const EXTRA_VERBS: &[&str] = &["sync", "hook up", "link", "mute", "wake", "cast", "fire up", "kill"];
const QUERY_WORDS: &[&str] = &[
    "how", "do", "i", "sync", "hook", "up", "link", "mute", "the", "tv", "alarm", "bluetooth", "wake", "me",
    "cast", "music", "fire", "kill", "timer", "set", "play", "can", "you", "light", "connect", "my",
];

#[test]
fn later_supported_action_is_preferred() {
    let norm = NormConfig::default();
    // "play" comes first but (play, alarm) is unsupported; "set" is.
    let r = answer("play set alarm", &Lexicons::shipped(), &norm);
    assert_eq!(r.action.as_deref(), Some("create"));
    assert_eq!(r.response_id.as_deref(), Some("create_alarm"));
}

proptest! {
    #[test]
    fn lexicon_growth_never_loses_answers(
        words in prop::collection::vec(prop::sample::select(QUERY_WORDS), 1..8),
        verb in prop::sample::select(EXTRA_VERBS),
        target in prop::sample::select(&["connect", "turn_on", "delete", "play", "create"][..]),
    ) {
        let norm = NormConfig::default();
        let base = Lexicons::shipped();
        // Exercise the case where the new verb precedes a supported one.
        let words = if words.len() % 2 == 0 { [&[verb][..], &words[..]].concat() } else { words };
        let grown = Lexicons::from_sources(&format!("{ACTIONS}{verb}\t{target}\n"), AUX, SKILLS, TABLE, &norm).unwrap();
        let q = words.join(" ");
        if answer(&q, &base, &norm).response_id.is_some() {
            prop_assert!(answer(&q, &grown, &norm).response_id.is_some());
        }
    }

    #[test]
    fn every_input_yields_a_result(s in "\\PC{0,60}") {
        let norm = NormConfig::default();
        let _ = answer(&s, &Lexicons::shipped(), &norm);
    }
}
