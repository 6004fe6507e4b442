use opcrit_core::mc::{
    estimate_marked_sum, estimate_pi0_slices, estimate_tail, estimate_tau, SimConfig,
};
use opcrit_core::oracle::{cone_build, event_prob_exact, EventSpec};
use opcrit_core::qalg::{int, rat, rat_to_f64, Rational};
use opcrit_core::walks::{LatticePoint, Site};

fn slice_exact(p: &Rational, t: u32) -> Rational {
    let cone = cone_build(1, t).unwrap();
    cone.slices[t as usize]
        .iter()
        .map(|x| event_prob_exact(&cone, &EventSpec::DoubleConn(x.clone()), p).unwrap())
        .sum()
}

fn marked_exact(p: &Rational) -> Rational {
    let cone = cone_build(1, 2).unwrap();
    let mut total = Rational::from_integer(0.into());
    for x in &cone.slices[2] {
        for s in Site::origin().neighbors(1) {
            total += event_prob_exact(
                &cone,
                &EventSpec::MarkedFirstBond {
                    s,
                    x: x.clone(),
                    y: x.clone(),
                },
                p,
            )
            .unwrap();
        }
    }
    total
}

#[test]
fn d1_statistics_match_enumeration() {
    for (p, seed) in [(rat(1, 2), 17u64), (int(1), 23)] {
        let cfg = SimConfig::new(1, &p, 4, 20_000, seed).unwrap();
        let x = LatticePoint::parse("(o,2)").unwrap();
        let tau = estimate_tau(&cfg, &x).unwrap();
        let cone = cone_build(1, 2).unwrap();
        let exact =
            event_prob_exact(&cone, &EventSpec::Connect(LatticePoint::origin(), x), &p).unwrap();
        assert!(
            tau.within(rat_to_f64(&exact), 4.0),
            "tau {tau:?} vs {exact}"
        );

        let slices = estimate_pi0_slices(&cfg).unwrap();
        for t in 1..=4u32 {
            let exact = rat_to_f64(&slice_exact(&p, t));
            assert!(
                slices[t as usize - 1].within(exact, 4.0),
                "t={t} {:?} vs {exact}",
                slices[t as usize - 1]
            );
        }
        let tail = estimate_tail(&cfg, 2, 4).unwrap();
        let exact: f64 = (2..=4).map(|t| rat_to_f64(&slice_exact(&p, t))).sum();
        assert!(tail.within(exact, 4.0));

        let marked = estimate_marked_sum(&cfg, 2).unwrap();
        assert!(
            marked.within(rat_to_f64(&marked_exact(&p)), 4.0),
            "{marked:?}"
        );
    }
}

#[test]
fn doubling_replicas_shrinks_stderr() {
    let p = rat(3, 2);
    let a = estimate_pi0_slices(&SimConfig::new(2, &p, 2, 20_000, 5).unwrap()).unwrap();
    let b = estimate_pi0_slices(&SimConfig::new(2, &p, 2, 40_000, 5).unwrap()).unwrap();
    let ratio = a[1].stderr / b[1].stderr;
    assert!((ratio - 2f64.sqrt()).abs() < 0.15, "{ratio}");
}
