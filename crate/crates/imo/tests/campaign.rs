use imo::bench::{
    performance_profile, records_csv, run_campaign, stats_csv, stats_table, write_file,
    CampaignSpec, Metric, RunStatus,
};
use imo::problems::corpus;
use imo::solver::DirectionKind;

fn spec(runs: usize, seed: u64) -> CampaignSpec {
    CampaignSpec::new(
        corpus().iter().map(|p| p.name.clone()).collect(),
        vec![DirectionKind::Newton],
        runs,
        seed,
    )
}

#[test]
fn corpus_campaign_is_ordered_and_mostly_critical() {
    let records = run_campaign(&spec(10, 42)).unwrap();
    assert_eq!(records.len(), 200);
    for (k, r) in records.iter().enumerate() {
        assert_eq!(r.run_index, k % 10);
        assert_ne!(r.status, RunStatus::LineSearchFailed, "{}", r.problem);
        assert_ne!(r.status, RunStatus::Error, "{}", r.problem);
    }
    let critical = records
        .iter()
        .filter(|r| r.status == RunStatus::Critical)
        .count();
    // I-TR1 is unbounded below on its box and never certifies.
    assert_eq!(critical, 190);
    assert!(records
        .iter()
        .filter(|r| r.problem == "I-TR1")
        .all(|r| r.status == RunStatus::MaxIterations));
}

#[test]
fn different_seeds_give_different_starts() {
    let a = run_campaign(&spec(2, 1)).unwrap();
    let b = run_campaign(&spec(2, 2)).unwrap();
    assert!(a.iter().zip(&b).any(|(x, y)| x.x0 != y.x0));
}

#[test]
fn stats_and_profiles_round_trip_to_disk() {
    let mut s = spec(3, 5);
    s.problems.truncate(6);
    s.solvers.push(DirectionKind::SteepestDescent);
    let records = run_campaign(&s).unwrap();
    let rows = stats_table(&records);
    assert_eq!(rows.len(), 12);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/stats.csv");
    write_file(&path, &stats_csv(&rows).unwrap()).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 13);
    write_file(
        &dir.path().join("records.csv"),
        &records_csv(&records).unwrap(),
    )
    .unwrap();

    let profile = performance_profile(&records, Metric::Iterations).unwrap();
    for c in &profile.curves {
        assert!(c.rho.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(*c.rho.last().unwrap(), 1.0);
        assert_eq!(c.ratios.len() + profile.excluded.len(), 6);
    }
}
