//! Monte Carlo estimates against the analytic measures.

use mvdrisk::{
    expected_loss, lgd_liquidation, pd_liquidation, simulate, LoanContext, MvdDistribution,
    QuadratureConfig, SimulationSpec,
};

struct Analytic {
    el: f64,
    pd: f64,
    lgd: f64,
}

fn analytic(lvr: f64, dist: &MvdDistribution, p_a: f64) -> Analytic {
    let ctx = LoanContext::with_pd(p_a).unwrap();
    let quad = QuadratureConfig::default();
    Analytic {
        el: expected_loss(lvr, dist, &ctx, &quad).unwrap(),
        pd: pd_liquidation(lvr, dist, &ctx).unwrap(),
        lgd: lgd_liquidation(lvr, dist, &quad).unwrap(),
    }
}

fn within(x: f64, target: f64, se: f64) -> bool {
    (x - target).abs() <= 3.0 * se + 1e-12
}

#[test]
fn estimators_cover_analytic_values_across_seeds() {
    let cases = [
        (MvdDistribution::normal(0.0, 0.20).unwrap(), 1.0, 0.075),
        (MvdDistribution::normal(0.0, 0.30).unwrap(), 0.8, 0.10),
        (
            MvdDistribution::normal(0.0, 0.20)
                .unwrap()
                .truncate_renormalize(-0.2)
                .unwrap(),
            1.1,
            0.075,
        ),
    ];
    for (dist, lvr, p_a) in cases {
        let a = analytic(lvr, &dist, p_a);
        let (mut el_ok, mut pd_ok, mut lgd_ok) = (0, 0, 0);
        let seeds = 1000;
        for seed in 0..seeds {
            let r = simulate(&SimulationSpec {
                n_trials: 5_000,
                seed,
                lvr,
                p_a,
                dist: dist.clone(),
            })
            .unwrap();
            el_ok += within(r.mean_loss, a.el, r.std_error_mean_loss) as u32;
            pd_ok += within(r.loss_frequency, a.pd, r.std_error_loss_frequency) as u32;
            lgd_ok += within(r.mean_loss_given_loss, a.lgd, r.std_error_mean_loss_given_loss) as u32;
        }
        for (name, ok) in [("el", el_ok), ("pd", pd_ok), ("lgd", lgd_ok)] {
            assert!(ok as u64 * 100 >= 99 * seeds, "{dist:?} {name}: {ok}/{seeds} within 3 SE");
        }
    }
}

#[test]
fn dirac_simulation_matches_closed_form() {
    let dist = MvdDistribution::dirac(-0.45).unwrap();
    let r = simulate(&SimulationSpec {
        n_trials: 1_000_000,
        seed: 2024,
        lvr: 1.0,
        p_a: 0.075,
        dist,
    })
    .unwrap();
    assert!(within(r.mean_loss, 0.03375, r.std_error_mean_loss));
    assert!(within(r.loss_frequency, 0.075, r.std_error_loss_frequency));
    assert!((r.mean_loss_given_loss - 0.45).abs() < 1e-12);
}
