use logic_mining::ca::{random_config, rule_from_function, step, step_reference, Config};
use logic_mining::minimize::minimize;
use logic_mining::signal::{detect_peaks_in, segment_states, synthesize_recording, Baseline, PeakOptions, Schema, SynthParams, ThresholdBand, CHANNELS, STATES};
use logic_mining::sop::{Literal, ProductTerm, SopExpr, Var};
use logic_mining::{Recording, TruthTable};
use proptest::prelude::*;

fn term_strategy() -> impl Strategy<Value = ProductTerm> {
    // each variable: absent, positive or negative; at least one present
    prop::array::uniform4(0u8..3)
        .prop_filter("empty term", |a| a.iter().any(|&x| x != 0))
        .prop_map(|a| {
            ProductTerm::new(Var::ALL.iter().zip(a).filter(|(_, x)| *x != 0).map(|(&v, x)| {
                if x == 1 {
                    Literal::pos(v)
                } else {
                    Literal::neg(v)
                }
            }))
            .unwrap()
        })
}

proptest! {
    #[test]
    fn id_table_bijection(id in any::<u16>()) {
        let tt = TruthTable::from_id(id);
        prop_assert_eq!(tt.id(), id);
        prop_assert_eq!(TruthTable::from_fn(|k| tt.output(k)), tt);
        let bits: [bool; 16] = std::array::from_fn(|k| tt.output(k as u8));
        prop_assert_eq!(TruthTable::from_bits(bits), tt);
        prop_assert_eq!(tt.complement().complement(), tt);
    }

    #[test]
    fn format_parse_round_trip(terms in prop::collection::vec(term_strategy(), 0..6)) {
        let expr = SopExpr::from_terms(terms);
        let text = expr.to_string();
        let back: SopExpr = text.parse().unwrap();
        prop_assert_eq!(&back, &expr);
        prop_assert_eq!(back.to_truth_table(), expr.to_truth_table());
    }

    #[test]
    fn minimized_form_reparses(id in any::<u16>()) {
        let tt = TruthTable::from_id(id);
        let text = minimize(tt).to_string();
        let back: SopExpr = text.parse().unwrap();
        prop_assert_eq!(back.to_truth_table(), tt);
    }

    #[test]
    fn peak_existence_monotone_in_theta(
        samples in prop::collection::vec(-200.0f64..200.0, 1..80),
        t1 in 1.0f64..200.0,
        dt in 0.0f64..100.0,
        zero in any::<bool>(),
    ) {
        let opts = PeakOptions { baseline: if zero { Baseline::Zero } else { Baseline::Median }, min_width: 1 };
        let lo = detect_peaks_in(&samples, ThresholdBand::new(t1).unwrap(), &opts);
        let hi = detect_peaks_in(&samples, ThresholdBand::new(t1 + dt).unwrap(), &opts);
        prop_assert!(hi.count == 0 || lo.count >= 1);
        prop_assert!(hi.max_excursion <= lo.max_excursion || hi.count == 0);
    }

    #[test]
    fn peaks_ignore_polarity(samples in prop::collection::vec(-200.0f64..200.0, 1..80), theta in 1.0f64..150.0) {
        let opts = PeakOptions::default();
        let band = ThresholdBand::new(theta).unwrap();
        let neg: Vec<f64> = samples.iter().map(|v| -v).collect();
        let a = detect_peaks_in(&samples, band, &opts);
        let b = detect_peaks_in(&neg, band, &opts);
        prop_assert_eq!(a.count, b.count);
        prop_assert_eq!(a.locations, b.locations);
    }

    #[test]
    fn boundary_locality(id in any::<u16>(), width in 5usize..140, seed in any::<u64>(), flip in any::<prop::sample::Index>()) {
        let rule = rule_from_function(TruthTable::from_id(id));
        let x = random_config(width, 0.5, seed).unwrap();
        let j = flip.index(width);
        let mut y = x.clone();
        y.set(j, !x.get(j));
        let (sx, sy) = (step(&x, rule), step(&y, rule));
        prop_assert_eq!(&sx, &step_reference(&x, rule));
        for i in 0..width {
            if i + 2 < j || i > j + 2 {
                prop_assert_eq!(sx.get(i), sy.get(i), "cell {} changed by flipping {}", i, j);
            }
        }
    }

    #[test]
    fn segmentation_partitions(sps in 4usize..40, seed in any::<u64>(), ids in prop::array::uniform7(any::<u16>())) {
        let tables = ids.map(TruthTable::from_id);
        let rec: Recording = synthesize_recording(&tables, &SynthParams { samples_per_state: sps, seed, ..Default::default() }).unwrap();
        let windows = segment_states(&rec, &Schema::default()).unwrap();
        prop_assert_eq!(windows.len(), STATES);
        prop_assert_eq!(windows[0].start, 0);
        prop_assert_eq!(windows[STATES - 1].end, rec.len());
        for (k, w) in windows.iter().enumerate() {
            prop_assert_eq!(w.state_index as usize, k);
            prop_assert!(!w.is_empty());
            for c in 0..CHANNELS {
                prop_assert_eq!(w.channel(c).len(), w.len());
            }
        }
        for pair in windows.windows(2) {
            prop_assert_eq!(pair[0].end, pair[1].start);
        }
    }
}

#[test]
fn homogeneous_zero_stays_zero_for_quiescent_rules() {
    // f(0000) = 0 keeps an all-zero row all-zero, boundary included
    for id in (0..=u16::MAX).step_by(2).take(2000) {
        let rule = rule_from_function(TruthTable::from_id(id));
        let z = Config::zeros(37).unwrap();
        assert_eq!(step(&z, rule), z, "rule {id}");
    }
}
