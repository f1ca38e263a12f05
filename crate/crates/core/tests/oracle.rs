mod common;

use nlo_teleport::noise::{ChannelDescriptor, NoiseVariant, ProductMode};
use nlo_teleport::protocol::{run_protocol, NoiseSpec, NoiseTargets, ProtocolConfig};
use nlo_teleport::states::PureState;
use nlo_teleport::tensor::ComplexVector;

use common::OracleCase;

fn compare(case: &OracleCase) {
    let oracle = common::run(case);
    let input = PureState::normalize(ComplexVector::new(case.input.clone())).unwrap();
    let config = ProtocolConfig::new(input).with_noise(NoiseSpec {
        channel: ChannelDescriptor {
            variant: case.variant,
            p: case.p,
            mode: case.mode,
        },
        targets: case.targets,
    });
    let res = run_protocol(&config).unwrap();
    assert!(
        (res.average_fidelity - oracle.average_fidelity).abs() < 1e-9,
        "{case:?}: {} vs {}",
        res.average_fidelity,
        oracle.average_fidelity
    );
    for (k, record) in res.records.iter().enumerate() {
        assert!(
            (record.probability - oracle.probabilities[k]).abs() < 1e-10,
            "{case:?} outcome {k}"
        );
        if let Some(f) = record.fidelity {
            assert!((f - oracle.fidelities[k]).abs() < 1e-9, "{case:?} outcome {k}");
        }
    }
}

#[test]
fn oracle_literal_operators_match_library() {
    use nlo_teleport::measurement::{measurement_operator, Convention};
    use nlo_teleport::noise::{crosstalk_channel, weyl};
    for d in 2..=5 {
        for i in 0..d {
            for m in 0..d {
                assert!(weyl(d, i, m).unwrap().matrix.max_abs_diff(&common::weyl(d, i, m)) < 1e-12);
                let lib = measurement_operator(d, i, m, Convention::General).unwrap();
                assert!(lib.matrix().max_abs_diff(&common::measurement(d, i, m)) < 1e-12);
            }
        }
        for variant in [NoiseVariant::Shift, NoiseVariant::Phase, NoiseVariant::Weyl] {
            let lib = crosstalk_channel(d, 0.4, variant).unwrap();
            let lit = common::kraus(d, variant, 0.4);
            assert_eq!(lib.len(), lit.len());
            for (a, b) in lib.operators().iter().zip(&lit) {
                assert!(a.max_abs_diff(b) < 1e-12);
            }
        }
    }
}

#[test]
fn per_outcome_agreement_all_targets_and_modes() {
    let targets = [NoiseTargets::A1, NoiseTargets::A2, NoiseTargets::Both];
    for d in [2, 3] {
        for variant in [NoiseVariant::Shift, NoiseVariant::Phase, NoiseVariant::Weyl] {
            for (t, &target) in targets.iter().enumerate() {
                for mode in [ProductMode::Independent, ProductMode::Correlated] {
                    compare(&OracleCase {
                        d,
                        input: common::scrambled(d, (d * 100 + t) as u64),
                        variant,
                        p: 0.45,
                        targets: target,
                        mode,
                    });
                }
            }
        }
    }
}

#[test]
fn full_strength_noise() {
    for d in [2, 3, 4] {
        for variant in [NoiseVariant::Shift, NoiseVariant::Phase, NoiseVariant::Weyl] {
            compare(&OracleCase {
                d,
                input: common::scrambled(d, 7),
                variant,
                p: 1.0,
                targets: NoiseTargets::Both,
                mode: ProductMode::Independent,
            });
        }
    }
}

#[test]
fn weyl_noise_on_both_qudits_has_closed_form() {
    for d in [2, 3] {
        for p in [0.2, 0.6, 0.9] {
            let oracle = common::run(&OracleCase {
                d,
                input: common::uniform(d),
                variant: NoiseVariant::Weyl,
                p,
                targets: NoiseTargets::Both,
                mode: ProductMode::Independent,
            });
            assert!((oracle.average_fidelity - common::weyl_both_closed_form(d, p)).abs() < 1e-10);
        }
    }
    for d in [4, 5, 8] {
        for p in [0.2, 0.6, 0.9] {
            let input = PureState::normalize(ComplexVector::new(common::uniform(d))).unwrap();
            let config = ProtocolConfig::new(input).with_noise(NoiseSpec {
                channel: ChannelDescriptor {
                    variant: NoiseVariant::Weyl,
                    p,
                    mode: ProductMode::Independent,
                },
                targets: NoiseTargets::Both,
            });
            let f = run_protocol(&config).unwrap().average_fidelity;
            assert!((f - common::weyl_both_closed_form(d, p)).abs() < 1e-10, "d={d} p={p}");
        }
    }
}
