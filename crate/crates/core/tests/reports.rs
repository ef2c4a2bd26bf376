use flagtc::store::ResultStore;
use flagtc::zcl::{bounds_up_to, gap_sequence, tc_report, Provenance, ReportOptions};
use flagtc::{Error, Space, ZdSpec};

#[test]
fn best_admissible_pair_wins() {
    let r = tc_report(Space::flag(3, 6), 2, &ReportOptions::default(), None).unwrap();
    assert_eq!((r.lower, r.upper), (36, 42));
    assert_eq!(r.provenance, Provenance::TwoFold { delta: 2, e: 3 });
    assert!(r.candidates.iter().any(|c| c.degree == 21 && c.nonzero == Some(true)));
}

#[test]
fn complete_flag_witness() {
    let r = tc_report(Space::parse("F5").unwrap(), 2, &ReportOptions::default(), None).unwrap();
    assert_eq!((r.lower, r.upper), (18, 20));
    assert_eq!(r.witness, "z[2,1]^7*z[2,2]^6*z[2,3]^3*z[2,4]^2");
}

#[test]
fn upper_bound_is_s_times_dim() {
    for (k, m) in [(1, 3), (2, 2), (3, 1), (3, 4)] {
        let r = tc_report(Space::flag(k, m), 2, &ReportOptions::default(), None).unwrap();
        assert_eq!(r.upper, (k * (2 * m + k - 1)) as u64);
        assert!(r.lower <= r.upper);
    }
}

#[test]
fn projective_space_gaps() {
    for m in [2, 4, 8] {
        let gaps: Vec<u64> = gap_sequence(1, m, 5, &ReportOptions::default()).unwrap().iter().map(|g| g.value).collect();
        assert_eq!(gaps, [1, 0, 0, 0], "m = {m}");
    }
}

#[test]
fn two_flag_gaps() {
    for g in gap_sequence(2, 2, 6, &ReportOptions::default()).unwrap().iter().filter(|g| g.s >= 3) {
        assert!(g.value <= 3, "G(2,2,{}) = {}", g.s, g.value);
    }
    for m in [4, 8] {
        for g in gap_sequence(2, m, 5, &ReportOptions::default()).unwrap().iter().filter(|g| g.s >= 3) {
            assert!(g.value <= 1, "G(2,{m},{}) = {}", g.s, g.value);
        }
    }
}

#[test]
fn padding_carries_witnesses_upward() {
    let bounds = bounds_up_to(Space::flag(4, 1), 4, &ReportOptions::default(), None).unwrap();
    assert_eq!(bounds.len(), 3);
    for w in bounds.windows(2) {
        assert!(w[1].lower >= w[0].lower + w[0].dim as u64, "s = {}", w[1].s);
    }
    assert!(bounds[2].candidates.iter().any(|c| matches!(c.provenance, Provenance::Padded { from_s: 3, .. })));
}

#[test]
fn user_products_are_evaluated_not_trusted() {
    let bogus = ZdSpec::parse("z1^7*z2^7").unwrap();
    let opts = ReportOptions { extra: vec![bogus], ..ReportOptions::default() };
    let r = tc_report(Space::flag(2, 1), 2, &opts, None).unwrap();
    assert_eq!(r.lower, 5);
    let user = r.candidates.iter().find(|c| c.provenance == Provenance::User).unwrap();
    assert_eq!(user.nonzero, Some(false));
}

#[test]
fn store_records_and_replays_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let store = ResultStore::open(dir.path().join("results.jsonl")).unwrap();
    let extra = ZdSpec::parse("z1^3*z2^2").unwrap();
    let opts = ReportOptions { extra: vec![extra.clone()], ..ReportOptions::default() };
    tc_report(Space::flag(2, 1), 2, &opts, Some(&store)).unwrap();
    assert_eq!(store.lookup("F(1^2,1)", 2, &extra.to_string()).unwrap(), Some(true));

    let again = tc_report(Space::flag(2, 1), 2, &ReportOptions::default(), Some(&store)).unwrap();
    let replayed: Vec<_> = again.candidates.iter().filter(|c| c.provenance == Provenance::Store).collect();
    assert!(replayed.iter().any(|c| c.spec == extra.to_string() && c.nonzero == Some(true)));
}

#[test]
fn surfaces_use_their_own_symbol() {
    let r = tc_report(Space::Surface { n: 2 }, 3, &ReportOptions::default(), None).unwrap();
    assert_eq!((r.lower, r.upper), (6, 6));
    assert!(r.witness.starts_with("c["));
}

#[test]
fn invalid_requests() {
    assert!(matches!(tc_report(Space::flag(2, 1), 1, &ReportOptions::default(), None), Err(Error::InvalidParameters(_))));
    assert!(Space::parse("F(2,3)").is_err());
}
