//! Tuner protocol properties: box containment, warm-up length, candidate
//! membership and determinism.

use cdt::glb::{AlgorithmSettings, HyperparamSpec, Theoretical};
use cdt::tuners::{
    self, schedule_defaults, Cdt, CdtConfig, HyperBox, Op, Syndicated, TunerKind, TunerSettings,
    Tuner, CANDIDATES_C1, CANDIDATES_C2,
};
use cdt::SeededRng;
use proptest::prelude::*;

fn specs(p: usize) -> Vec<HyperparamSpec> {
    let s = AlgorithmSettings::new(4, 1000);
    let mut out = vec![HyperparamSpec::new(
        "alpha",
        s.interval,
        Theoretical::ExplorationRate {
            sigma: s.sigma,
            dim: s.dim,
            lambda: s.lambda,
            delta: s.delta(),
            norm_bound: s.norm_bound,
        },
    )];
    if p == 2 {
        out.push(HyperparamSpec::new("stepsize", s.interval, Theoretical::Constant(1.0)));
    }
    out
}

fn drive(tuner: &mut dyn Tuner, horizon: u64, seed: u64) -> Vec<(Vec<f64>, bool)> {
    let mut rng = SeededRng::new(seed);
    (1..=horizon)
        .map(|t| {
            let p = tuner.propose(t, &mut rng).unwrap();
            // reward peaks at small first coordinates
            let y = if p.warm_up { rng.uniform() } else { 1.0 - p.values[0] / 5.0 + 0.1 * rng.standard_normal() };
            tuner.feedback(y).unwrap();
            (p.values, p.warm_up)
        })
        .collect()
}

#[test]
fn cdt_stays_in_box_and_warms_up_exactly_t1_rounds() {
    for p in [1usize, 2] {
        let hb = HyperBox::cube(p, 0.1, 5.0).unwrap();
        let cfg = CdtConfig::new(hb.clone(), 2000).unwrap();
        let t1 = cfg.t1;
        let mut cdt = Cdt::new(cfg).unwrap();
        let rounds = drive(&mut cdt, 2000, 4);
        let warm: Vec<bool> = rounds.iter().map(|r| r.1).collect();
        assert!(warm[..t1 as usize].iter().all(|w| *w));
        assert!(warm[t1 as usize..].iter().all(|w| !*w));
        assert!(rounds.iter().all(|(v, _)| hb.contains(v)));
        let d = cdt.diagnostics();
        assert_eq!(d.warm_up_rounds, t1);
        assert_eq!(d.tuned_rounds, 2000 - t1);
    }
}

#[test]
fn cdt_moves_toward_the_better_region() {
    let hb = HyperBox::cube(1, 0.1, 5.0).unwrap();
    let mut cfg = CdtConfig::new(hb, 6000).unwrap();
    cfg.tau0 = 0.1;
    let mut cdt = Cdt::new(cfg).unwrap();
    let rounds = drive(&mut cdt, 6000, 8);
    let late: Vec<f64> = rounds[5000..].iter().map(|r| r.0[0]).collect();
    let mean = late.iter().sum::<f64>() / late.len() as f64;
    assert!(mean < 2.55, "late mean {mean}");
}

#[test]
fn candidate_tuners_only_propose_candidates() {
    let mut syn = Syndicated::new(vec![CANDIDATES_C1.to_vec(), CANDIDATES_C2.to_vec()], 500).unwrap();
    for (v, warm) in drive(&mut syn, 500, 1) {
        assert!(!warm);
        assert!(CANDIDATES_C1.contains(&v[0]));
        assert!(CANDIDATES_C2.contains(&v[1]));
    }
    let mut op = Op::new(CANDIDATES_C1.to_vec(), specs(2)).unwrap();
    for (t, (v, _)) in drive(&mut op, 300, 2).into_iter().enumerate() {
        assert!(CANDIDATES_C1.contains(&v[0]));
        assert_eq!(v[1], specs(2)[1].theoretical.value(t as u64 + 1));
    }
}

#[test]
fn syndicated_probabilities_stay_on_the_simplex() {
    let mut syn = Syndicated::new(vec![CANDIDATES_C1.to_vec()], 1000).unwrap();
    drive(&mut syn, 1000, 5);
    let p = syn.probabilities(0);
    assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    assert_eq!(p.len(), CANDIDATES_C1.len());
}

#[test]
fn op_samples_the_dominant_candidate() {
    let op = Op::new(vec![1.0, 2.0, 3.0], specs(1))
        .unwrap()
        .with_stats(vec![400, 400, 400], vec![0.2, 0.9, 0.3])
        .unwrap();
    let mut rng = SeededRng::new(0);
    let hits = (0..1000).filter(|_| op.sample_index(&mut rng) == 1).count();
    assert!(hits > 950, "{hits}/1000");
}

#[test]
fn every_tuner_is_deterministic() {
    for kind in [TunerKind::Cdt, TunerKind::Syndicated, TunerKind::Op, TunerKind::Theory] {
        for p in [1usize, 2] {
            let settings = TunerSettings::new(800, specs(p));
            let mut a = tuners::build(kind, &settings).unwrap();
            let mut b = tuners::build(kind, &settings).unwrap();
            assert_eq!(drive(a.as_mut(), 800, 3), drive(b.as_mut(), 800, 3), "{kind:?} p={p}");
        }
    }
}

#[test]
fn feedback_requires_a_proposal() {
    for kind in [TunerKind::Cdt, TunerKind::Syndicated, TunerKind::Op] {
        let mut t = tuners::build(kind, &TunerSettings::new(100, specs(1))).unwrap();
        assert!(t.feedback(0.5).is_err(), "{kind:?}");
    }
}

#[test]
fn schedule_grows_with_horizon_and_shrinks_with_dimension() {
    let (a1, a2) = schedule_defaults(1000, 1).unwrap();
    let (b1, b2) = schedule_defaults(100_000, 1).unwrap();
    let (c1, _) = schedule_defaults(100_000, 3).unwrap();
    assert!(a1 < b1 && a2 < b2);
    assert!(c1 < b1);
    assert!(schedule_defaults(3, 1).is_err());
    assert!(schedule_defaults(100, 0).is_err());
}

proptest! {
    #[test]
    fn map_and_unmap_are_inverse(lo in -10.0f64..10.0, width in 0.0f64..20.0, u in 0.0f64..=1.0) {
        let hb = HyperBox::new(vec![lo, 0.0], vec![lo + width, 1.0]).unwrap();
        let v = hb.map(&[u, u]).unwrap();
        prop_assert!(hb.contains(&v));
        let back = hb.unmap(&v).unwrap();
        if width > 0.0 {
            prop_assert!((back[0] - u).abs() <= 1e-12);
        } else {
            prop_assert_eq!(back[0], 0.5);
        }
        prop_assert!((back[1] - u).abs() <= 1e-12);
    }

    #[test]
    fn out_of_box_values_are_rejected(x in 5.000_001f64..100.0) {
        let hb = HyperBox::cube(1, 0.1, 5.0).unwrap();
        prop_assert!(hb.unmap(&[x]).is_err());
        prop_assert!(hb.map(&[1.5]).is_err());
    }
}
