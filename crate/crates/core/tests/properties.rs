use gomea_core::benchmarks::{MaxCut, Rosenbrock, Trap};
use gomea_core::fitness::Undo;
use gomea_core::gaussian::{ConditionalGaussian, MeanCovariance};
use gomea_core::ims::{ims_step, Flow, ImsConfig, Interleaved};
use gomea_core::linkage::{
    build_linkage_tree, build_static_linkage_tree, format_custom_fos, parse_custom_fos, MergeFilter, SimilarityMatrix,
    Vig,
};
use gomea_core::*;
use proptest::prelude::*;
use rand::Rng;

fn gray<G: Gene>(f: &dyn GrayBoxFunction<G>, sense: Sense) -> Evaluator<'_, G> {
    Evaluator::new(Fitness::GrayBox(SubfunctionDecomposition::new(f).unwrap()), sense, &NoClock).unwrap()
}

/// Random walks of partial modifications; the buffered state must match a
/// fresh evaluation after every step.
fn binary_walk(f: &dyn GrayBoxFunction<u8>, seed: u64, steps: usize) {
    let ell = f.number_of_variables();
    let mut rng = make_rng(seed);
    let mut ev = gray(f, Sense::Maximize);
    let g: Vec<u8> = (0..ell).map(|_| rng.random_range(0..2)).collect();
    let mut s = ev.full_evaluate(g).unwrap();
    let mut undo = Undo::default();
    for _ in 0..steps {
        let n = rng.random_range(1..=4.min(ell));
        let changes: Vec<(usize, u8)> = (0..n).map(|_| (rng.random_range(0..ell), rng.random_range(0..2))).collect();
        ev.apply_partial(&mut s, &changes, &mut undo).unwrap();
        if rng.random_bool(0.3) {
            ev.revert(&mut s, &undo);
        }
        let fresh = ev.full_evaluate(s.genotype.clone()).unwrap();
        assert_eq!(s.objective, fresh.objective);
        assert_eq!(s.buffers, fresh.buffers);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn trap_buffers_match_full_evaluation(seed in any::<u64>()) {
        binary_walk(&Trap::new(40, 5).unwrap(), seed, 100);
    }

    #[test]
    fn maxcut_buffers_match_full_evaluation(seed in any::<u64>()) {
        binary_walk(&MaxCut::torus(4).unwrap(), seed, 100);
    }

    #[test]
    fn rosenbrock_buffers_match_within_tolerance(seed in any::<u64>()) {
        let f = Rosenbrock::new(16).unwrap();
        let mut rng = make_rng(seed);
        let mut ev = gray(&f, Sense::Minimize);
        let g: Vec<f64> = (0..16).map(|_| rng.random_range(-2.0..2.0)).collect();
        let mut s = ev.full_evaluate(g).unwrap();
        let mut undo = Undo::default();
        for _ in 0..100 {
            let n = rng.random_range(1..=4);
            let changes: Vec<(usize, f64)> =
                (0..n).map(|_| (rng.random_range(0..16), rng.random_range(-2.0..2.0))).collect();
            ev.apply_partial(&mut s, &changes, &mut undo).unwrap();
            let fresh = ev.full_evaluate(s.genotype.clone()).unwrap();
            let rel = (s.objective - fresh.objective).abs() / fresh.objective.abs().max(1e-300);
            prop_assert!(rel <= 1e-9, "relative error {rel}");
        }
    }

    #[test]
    fn unfiltered_tree_has_two_ell_minus_two_sets(ell in 2usize..=16, seed in any::<u64>()) {
        let mut rng = make_rng(seed);
        let values: Vec<f64> = (0..ell * ell).map(|_| rng.random::<f64>()).collect();
        let sim = SimilarityMatrix::from_fn(ell, |a, b| values[a.min(b) * ell + a.max(b)]);
        let fos = build_linkage_tree(&sim, MergeFilter::None, 0, Domain::Discrete, &mut rng);
        prop_assert_eq!(fos.len(), 2 * ell - 2);
        fos.validate(Domain::Discrete).unwrap();
    }

    #[test]
    fn static_tree_never_mixes_trap_blocks(seed in any::<u64>()) {
        let trap = Trap::new(40, 5).unwrap();
        let d = SubfunctionDecomposition::new(&trap).unwrap();
        let vig = Vig::from_inputs(40, d.inputs());
        let fos = build_static_linkage_tree(&vig, None, 0, Domain::Discrete, &mut make_rng(seed));
        for set in fos.sets() {
            prop_assert!(set.iter().all(|&u| u / 5 == set[0] / 5));
        }
    }

    #[test]
    fn linkage_grammar_round_trips(kind in 0usize..8, a in 1usize..9, b in any::<bool>()) {
        let text = match kind {
            0 => "univariate".to_string(),
            1 => "full".to_string(),
            2 => format!("block:{a}"),
            3 => format!("lt:{}{}:max={a}", if b { "mi" } else { "nmi" }, if b { ":filtered" } else { "" }),
            4 => format!("slt:max={a}"),
            5 => "cond:ucondgg".to_string(),
            6 => format!("cond:mcondhg:{a}"),
            _ => "cond:ucondfg".to_string(),
        };
        let model: LinkageModel = text.parse().unwrap();
        let again: LinkageModel = model.to_string().parse().unwrap();
        prop_assert_eq!(model, again);
    }

    #[test]
    fn custom_fos_text_round_trips(sets in prop::collection::vec(prop::collection::btree_set(0usize..12, 1..5), 1..6)) {
        let sets: Vec<Vec<usize>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        prop_assert_eq!(parse_custom_fos(&format_custom_fos(&sets), 12).unwrap(), sets);
    }

    #[test]
    fn samples_are_finite_for_degenerate_covariance(seed in any::<u64>(), scale in 0.0f64..1e3) {
        let mut rng = make_rng(seed);
        // rank-one data: every column a multiple of the first
        let rows: Vec<Vec<f64>> = (0..8).map(|_| {
            let t: f64 = rng.random::<f64>() * scale;
            vec![t, 2.0 * t, -t]
        }).collect();
        let views: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        let model = ConditionalGaussian::estimate(&views, &[0, 1], &[2]);
        let (mut out, mut z) = (Vec::new(), Vec::new());
        for _ in 0..32 {
            model.sample(&rows[0], 1.0, &mut rng, &mut out, &mut z);
            prop_assert!(out.iter().all(|v| v.is_finite()));
        }
    }
}

#[test]
fn conditional_mean_matches_analytic_law() {
    // joint (x1, x0) with means (0.5, 1), var(x1) = 2, var(x0) = 4, cov = 1.5
    let joint = MeanCovariance { mean: vec![0.5, 1.0], covariance: vec![2.0, 1.5, 1.5, 4.0] };
    let model = ConditionalGaussian::from_joint(&joint, vec![1], vec![0]);
    let x0 = 3.0;
    let analytic_mean = 0.5 + 1.5 / 4.0 * (x0 - 1.0);
    let analytic_var = 2.0 - 1.5 * 1.5 / 4.0;
    let mut rng = make_rng(99);
    let genotype = [x0, 0.0];
    let (mut out, mut z) = (Vec::new(), Vec::new());
    let n = 10_000;
    let mut sum = 0.0;
    for _ in 0..n {
        model.sample(&genotype, 1.0, &mut rng, &mut out, &mut z);
        sum += out[0];
    }
    let mean = sum / n as f64;
    let se = (analytic_var / n as f64).sqrt();
    assert!((mean - analytic_mean).abs() < 3.0 * se, "mean {mean} vs {analytic_mean}");
}

struct Recorder {
    generations: Vec<u64>,
    log: Vec<usize>,
}

impl Interleaved for Recorder {
    fn population_count(&self) -> usize {
        self.generations.len()
    }
    fn create_population(&mut self, _: usize) -> Result<()> {
        self.generations.push(0);
        Ok(())
    }
    fn generations(&self, i: usize) -> u64 {
        self.generations[i]
    }
    fn is_live(&self, _: usize) -> bool {
        true
    }
    fn run_generation(&mut self, i: usize) -> Result<Flow> {
        self.generations[i] += 1;
        self.log.push(i);
        Ok(Flow::Continue)
    }
}

#[test]
fn ims_schedule_keeps_floor_ratio() {
    let cfg = ImsConfig { base_population_size: 2, subgeneration_factor: 4, max_populations: 25 };
    let mut r = Recorder { generations: vec![], log: vec![] };
    for _ in 0..500 {
        ims_step(&mut r, &cfg).unwrap();
        for j in 1..r.generations.len() {
            assert_eq!(r.generations[j], r.generations[j - 1] / 4);
        }
    }
}

#[test]
fn accepted_steps_never_degrade_a_solution() {
    let trap = Trap::new(20, 5).unwrap();
    let mut ev = gray(&trap, Sense::Maximize);
    let mut rng = make_rng(17);
    let mut s = ev.full_evaluate((0..20).map(|_| rng.random_range(0..2)).collect()).unwrap();
    let mut undo = Undo::default();
    for _ in 0..500 {
        let before = s.objective;
        let u = rng.random_range(0..20);
        let flipped = 1 - s.genotype[u];
        ev.apply_partial(&mut s, &[(u, flipped)], &mut undo).unwrap();
        if !ev.accepts_change(&s, &undo) {
            ev.revert(&mut s, &undo);
        }
        assert!(s.objective >= before);
    }
}
