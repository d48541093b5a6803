//! End-to-end acceptance suite. Each test exercises one criterion at its
//! stated tolerance and prints a PASS line (visible with `--nocapture`).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ammlab_core::analytics::{
    arbitrage_to_price, average_execution_price, depth_loss, impermanent_loss,
    pool_value_in_quote, price_impact, Direction,
};
use ammlab_core::cfmm::{quote_input_for_exact_output, swap};
use ammlab_core::invariant_lab::{check_invariant_constancy, derive_curve};
use ammlab_core::shares::redeem_shares;
use ammlab_core::sim::{
    run_simulation, volatility_sweep, NoiseConfig, PriceProcessConfig, SimConfig, SimEventKind,
};
use ammlab_core::token_swap::swap_via_intermediary;
use ammlab_core::{Amount, FeeParam, PoolKind, PoolState, Price, Side, TokenSwapState};

fn cp_pool(a: f64, b: f64, gamma: f64) -> PoolState {
    PoolState::new(
        PoolKind::ConstantProduct,
        FeeParam::new(gamma).unwrap(),
        vec![("alpha", a), ("beta", b)],
    )
    .unwrap()
}

/// Criterion 1: token-swap two-step output equals the constant-product swap
/// at uniform reserve ratios, over 10,000 randomized states.
#[test]
fn criterion_1_tsmm_cp_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for case in 0..10_000 {
        let b_a = rng.random_range(1e-2..1e6f64);
        let b_b = rng.random_range(1e-2..1e6f64);
        let supply = rng.random_range(1.0..1e6f64);
        let delta = rng.random_range(1e-6..1.0f64) * b_b;

        let state = TokenSwapState::new(b_a, b_b, supply, 0.5, 0.5).unwrap();
        let pool = cp_pool(b_a, b_b, 1.0);
        let trade = Amount::new(delta).unwrap();
        let tsmm = swap_via_intermediary(&state, Side::B, trade)
            .unwrap()
            .output_amount
            .value();
        let cp = swap(&pool, "beta", "alpha", trade)
            .unwrap()
            .output_amount
            .value();
        assert!(
            (tsmm - cp).abs() / cp < 1e-9,
            "case {case}: tsmm={tsmm} cp={cp} (B_a={b_a}, B_b={b_b}, S={supply}, d={delta})"
        );
    }
    println!("PASS: criterion 1 — TSMM/CP equivalence over 10,000 randomized cases (1e-9 rel)");
}

/// Criterion 2: closed-form price impact equals the engine-measured spot
/// change on a grid of reserve fractions.
#[test]
fn criterion_2_price_impact_formula_vs_engine() {
    for i in 1..=95 {
        let f = i as f64 / 100.0;
        let pool = cp_pool(100.0, 100.0, 1.0);
        let out = Amount::new(f * 100.0).unwrap();
        let input = quote_input_for_exact_output(&pool, "beta", "alpha", out).unwrap();
        let q = swap(&pool, "beta", "alpha", input).unwrap();
        let measured = (q.spot_after.value() / q.spot_before.value() - 1.0) * 100.0;
        let formula = price_impact(f, Direction::BuyFromPool).unwrap();
        assert!(
            (formula - measured).abs() / measured.max(1.0) < 1e-9,
            "f={f}: formula={formula} measured={measured}"
        );
    }
    let at_half = price_impact(0.5, Direction::BuyFromPool).unwrap();
    assert!((at_half - 300.0).abs() < 1e-9);
    println!("PASS: criterion 2 — price impact formula matches engine on f grid; f=0.5 -> 300%");
}

/// Criterion 3: the impermanent-loss closed form matches an arbitrage
/// simulation oracle across price moves and fees, and is symmetric in xi.
#[test]
fn criterion_3_impermanent_loss_closed_form() {
    // Oracle: apply the leveling balance relations to concrete reserves and
    // mark pool vs hold portfolio at the post-move price.
    let il_oracle = |xi: f64, gamma: f64| {
        let (b_a, b_b) = (137.0, 411.0);
        let scale = (gamma * xi).sqrt();
        let (b_a2, b_b2) = (b_a / scale, b_b * scale);
        let p1 = xi * b_b / b_a;
        let pool_value = b_a2 * p1 + b_b2;
        let hold_value = b_a * p1 + b_b;
        (pool_value - hold_value) / hold_value * 100.0
    };
    for &xi in &[0.25, 0.5, 1.0, 1.5, 2.0, 4.0, 10.0] {
        for &g in &[1.0, 0.997] {
            let formula = impermanent_loss(xi, FeeParam::new(g).unwrap()).unwrap();
            let oracle = il_oracle(xi, g);
            assert!(
                (formula - oracle).abs() < 1e-9,
                "xi={xi} gamma={g}: formula={formula} oracle={oracle}"
            );
        }
        let up = impermanent_loss(xi, FeeParam::NO_FEE).unwrap();
        let down = impermanent_loss(1.0 / xi, FeeParam::NO_FEE).unwrap();
        assert!((up - down).abs() < 1e-12, "xi={xi}: {up} vs {down}");
    }
    let il4 = impermanent_loss(4.0, FeeParam::NO_FEE).unwrap();
    assert!((il4 - -20.0).abs() < 1e-9);
    println!(
        "PASS: criterion 3 — IL closed form matches arbitrage oracle (1e-9); xi=4 -> -20%; \
         IL(xi)=IL(1/xi) to 1e-12"
    );
}

/// Criterion 4: area under the price curve (quadrature) matches the closed
/// form; depth loss and average execution price check out.
#[test]
fn criterion_4_depth_loss_and_average_price() {
    let (b_a, b_b) = (100.0, 100.0);
    let k = b_a * b_b;
    let simpson = |lo: f64, hi: f64| {
        let n = 20_000;
        let h = (hi - lo) / n as f64;
        let price = |x: f64| k / (x * x);
        let mut acc = price(lo) + price(hi);
        for i in 1..n {
            acc += if i % 2 == 0 { 2.0 } else { 4.0 } * price(lo + i as f64 * h);
        }
        acc * h / 3.0
    };
    let pool = cp_pool(b_a, b_b, 1.0);
    for &f in &[0.1, 0.5, 0.9] {
        let paid = simpson(b_a * (1.0 - f), b_a);
        let closed = k * f / (b_a * (1.0 - f));
        assert!((paid - closed).abs() / closed < 1e-9, "f={f}");

        assert!((depth_loss(f, Direction::BuyFromPool).unwrap() - f * 100.0).abs() < 1e-12);

        let avg = average_execution_price(&pool, f).unwrap().value();
        assert!((avg - (b_b / b_a) / (1.0 - f)).abs() / avg < 1e-9, "f={f}");
    }
    println!(
        "PASS: criterion 4 — quadrature matches kf/(B(1-f)) (1e-9); depth loss f*100 at \
         f in {{0.1, 0.5, 0.9}}; average price scales as 1/(1-f)"
    );
}

/// Criterion 5: curve derivation recovers the constant-sum and
/// constant-product invariants; halving the step size improves constancy
/// by at least 8x.
#[test]
fn criterion_5_invariant_derivation() {
    let cs = derive_curve(|_, _| 1.0, (50.0, 50.0), 90.0, 10_000).unwrap();
    let dev_cs = check_invariant_constancy(&cs, |x, y| x + y);
    assert!(dev_cs < 1e-10, "constant-sum deviation {dev_cs}");

    // 4x reserve range: x from 100 to 400.
    let cp = derive_curve(|x, y| y / x, (100.0, 100.0), 400.0, 10_000).unwrap();
    let dev_cp = check_invariant_constancy(&cp, |x, y| x * y);
    assert!(dev_cp < 1e-6, "constant-product deviation {dev_cp}");

    // Order-4 convergence, measured on a smooth rule with visible
    // truncation error (the plain ratio rule is conserved to roundoff).
    let rule = |x: f64, y: f64| 4.0 * y / x;
    let candidate = |x: f64, y: f64| x.powf(0.8) * y.powf(0.2);
    let coarse = check_invariant_constancy(
        &derive_curve(rule, (100.0, 100.0), 400.0, 40).unwrap(),
        candidate,
    );
    let fine = check_invariant_constancy(
        &derive_curve(rule, (100.0, 100.0), 400.0, 80).unwrap(),
        candidate,
    );
    assert!(coarse / fine >= 8.0, "convergence ratio {}", coarse / fine);
    println!(
        "PASS: criterion 5 — x+y constant to {dev_cs:.2e}, x*y to {dev_cp:.2e}; halving steps \
         improves constancy {:.1}x",
        coarse / fine
    );
}

/// Criterion 6: a leveled pool is worth 2*sqrt(k*p) in quote tokens.
#[test]
fn criterion_6_leveled_pool_value() {
    let pool = cp_pool(100.0, 100.0, 1.0);
    let k = pool.invariant_value();
    for &p in &[0.25, 1.0, 4.0, 16.0] {
        let target = Price::new(p).unwrap();
        let trade = arbitrage_to_price(&pool, target).unwrap();
        let value = pool_value_in_quote(&trade.new_state, target).unwrap();
        let expected = 2.0 * (k * p).sqrt();
        assert!(
            (value - expected).abs() / expected < 1e-9,
            "p={p}: value={value} expected={expected}"
        );
    }
    println!("PASS: criterion 6 — leveled pool value equals 2*sqrt(k*p) for p in {{0.25,1,4,16}}");
}

fn sim_config(gamma: f64, sigma: f64, ticks: u64, noise: Option<NoiseConfig>) -> SimConfig {
    SimConfig {
        pool: cp_pool(1000.0, 1000.0, gamma).into(),
        price_process: PriceProcessConfig::Gbm {
            s0: 1.0,
            mu: 0.0,
            sigma,
        },
        noise,
        ticks,
        seed: 42,
    }
}

/// Criterion 7: the simulator's balance sheet closes and identical configs
/// produce byte-identical event logs.
#[test]
fn criterion_7_conservation_and_determinism() {
    let cfg = sim_config(
        0.997,
        0.05,
        300,
        Some(NoiseConfig {
            min_fraction: 0.001,
            max_fraction: 0.02,
        }),
    );
    let run = run_simulation(&cfg).unwrap();

    let mut pool = [1000.0f64, 1000.0];
    let mut agents = [0.0f64, 0.0];
    for event in &run.events {
        match &event.kind {
            SimEventKind::Arb {
                base_delta,
                quote_delta,
                ..
            } => {
                pool[0] += base_delta;
                pool[1] += quote_delta;
                agents[0] -= base_delta;
                agents[1] -= quote_delta;
            }
            SimEventKind::Trade {
                input_asset,
                input_amount,
                output_amount,
                ..
            } => {
                let (i, o) = if input_asset == "alpha" { (0, 1) } else { (1, 0) };
                pool[i] += input_amount;
                pool[o] -= output_amount;
                agents[i] -= input_amount;
                agents[o] += output_amount;
            }
            _ => {}
        }
    }
    assert!((pool[0] + agents[0] - 1000.0).abs() < 1e-9 * 1000.0);
    assert!((pool[1] + agents[1] - 1000.0).abs() < 1e-9 * 1000.0);
    assert!((pool[0] - run.final_state.reserves()[0].amount).abs() < 1e-9);
    assert!((pool[1] - run.final_state.reserves()[1].amount).abs() < 1e-9);

    let rerun = run_simulation(&cfg).unwrap();
    let log_a: Vec<String> = run
        .events
        .iter()
        .map(|e| serde_json::to_string(e).unwrap())
        .collect();
    let log_b: Vec<String> = rerun
        .events
        .iter()
        .map(|e| serde_json::to_string(e).unwrap())
        .collect();
    assert_eq!(log_a, log_b);
    println!("PASS: criterion 7 — balance sheet closes (1e-9); identical configs replay byte-identically");
}

/// Criterion 8: mean absolute terminal impermanent loss is non-decreasing
/// in volatility over a fixed-seed sweep.
#[test]
fn criterion_8_volatility_sweep_monotonicity() {
    let cfg = sim_config(1.0, 0.0, 250, None);
    let table = volatility_sweep(&cfg, &[0.01, 0.05, 0.10], 100).unwrap();
    assert_eq!(table.len(), 3);
    for pair in table.windows(2) {
        assert!(
            pair[1].1 >= pair[0].1,
            "mean |IL| not monotone: {table:?}"
        );
    }
    println!(
        "PASS: criterion 8 — mean |terminal IL| non-decreasing in sigma: {:?}",
        table
            .iter()
            .map(|(s, il)| format!("sigma={s}: {il:.4}%"))
            .collect::<Vec<_>>()
    );
}

/// Criterion 9: with fees and noise volume the invariant never shrinks, and
/// the LP redeems at least the entry value when the reference price returns
/// to its entry level.
#[test]
fn criterion_9_fee_accrual() {
    // Reference path returns to the entry price at the end.
    let mut values = vec![1.0];
    for i in 1..200 {
        values.push(1.0 + 0.1 * ((i as f64) * 0.37).sin());
    }
    values.push(1.0);
    let cfg = SimConfig {
        pool: cp_pool(1000.0, 1000.0, 0.997).into(),
        price_process: PriceProcessConfig::CsvReplay {
            values: values.clone(),
        },
        noise: Some(NoiseConfig {
            min_fraction: 0.001,
            max_fraction: 0.02,
        }),
        ticks: values.len() as u64 - 1,
        seed: 7,
    };
    let run = run_simulation(&cfg).unwrap();
    assert!(run.fees_accrued > 0.0);

    let invariants: Vec<f64> = run
        .events
        .iter()
        .filter_map(|e| match &e.kind {
            SimEventKind::Mark { invariant, .. } => Some(*invariant),
            _ => None,
        })
        .collect();
    assert!(
        invariants.windows(2).all(|w| w[1] >= w[0]),
        "invariant shrank somewhere"
    );

    let final_amounts: Vec<f64> = run.final_state.reserves().iter().map(|r| r.amount).collect();
    let payout = redeem_shares(&final_amounts, run.lp.shares, run.lp.shares).unwrap();
    let exit_value = payout[0] * 1.0 + payout[1];
    let entry_value = run.lp.entry_reserves[0] * 1.0 + run.lp.entry_reserves[1];
    assert!(
        exit_value >= entry_value,
        "exit {exit_value} < entry {entry_value}"
    );
    println!(
        "PASS: criterion 9 — k non-decreasing with fees; LP exit value {exit_value:.6} >= \
         entry {entry_value:.6} at equal reference prices"
    );
}
