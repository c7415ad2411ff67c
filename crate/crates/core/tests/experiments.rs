use ietshrink::experiment::{parse_columns, run_experiment, Experiment, ExperimentConfig};
use ietshrink::rauzy::{perron_iet, rv_path, step_permutation, RvStep};
use ietshrink::rotations::golden;
use ietshrink::{ExactNumber, Permutation};

#[test]
fn config_round_trips_through_json() {
    let text = r#"{"kind":"target-measure","target":{"family":"power","c":"1/3","s":2},"x":"1/7",
        "schedule":[[1,5],[2,9]],"metric":"circle","iets":[{"perm":[3,2,1],"lengths":["1/2","1/3","1/6"]}]}"#;
    let cfg = ExperimentConfig::from_json(text).unwrap();
    let again = ExperimentConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
    assert_eq!(cfg, again);
    assert!(matches!(cfg.experiment, Experiment::TargetMeasure { grid: 100, .. }));
}

#[test]
fn written_outputs_match_the_run() {
    let dir = std::env::temp_dir().join(format!("ietshrink-exp-{}", std::process::id()));
    let cfg = ExperimentConfig::from_json(r#"{"kind":"rv-path","n":6,"sampler":{"d":5,"Q":100000,"seed":3,"count":4}}"#)
        .unwrap();
    let out = run_experiment(&cfg).unwrap();
    let (csv, json) = out.write(&dir, "rv-path").unwrap();
    assert_eq!(std::fs::read_to_string(csv).unwrap(), out.csv);
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(summary, out.summary);
    assert_eq!(summary["trials"], 4);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn every_exact_column_round_trips() {
    let cfg = ExperimentConfig::from_json(&format!(
        r#"{{"kind":"target-measure","target":{{"family":"harmonic","c":"1/4"}},"schedule":[[1,20],[3,40]],
            "iet":{{"perm":[2,1],"lengths":["{}","{}"]}}}}"#,
        &ExactNumber::one() - &golden(),
        golden()
    ))
    .unwrap();
    let out = run_experiment(&cfg).unwrap();
    let mut rows = csv::Reader::from_reader(out.csv.as_bytes());
    for rec in rows.records() {
        let rec = rec.unwrap();
        let m = parse_columns(&rec[3], &rec[4]).unwrap();
        assert!((m.to_f64() - rec[5].parse::<f64>().unwrap()).abs() < 1e-9);
    }
}

#[test]
fn perron_loops_are_self_similar() {
    // every closed word of length <= 8 that perron_iet accepts must replay itself
    let mut accepted = 0;
    for (perm, len) in ["2 1", "3 2 1", "4 3 2 1"].iter().flat_map(|p| (1..=8u32).map(move |l| (p, l))) {
        let perm: Permutation = perm.parse().unwrap();
        for bits in 0..1u32 << len {
            let word: Vec<RvStep> = (0..len).map(|i| if bits >> i & 1 == 0 { RvStep::A } else { RvStep::B }).collect();
            let end = word.iter().fold(perm.clone(), |p, &s| step_permutation(&p, s));
            if end != perm {
                continue;
            }
            let Ok(t) = perron_iet(&perm, &word) else { continue };
            let rec = rv_path(&t, word.len()).unwrap();
            assert_eq!(rec.steps, word);
            assert!(rec.induced.is_rescaling_of(&t));
            accepted += 1;
        }
    }
    assert!(accepted > 0);
}
