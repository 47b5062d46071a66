//! Joint sweep cross-check: the partial-transpose witness is a necessary
//! condition, so every state with nonzero logarithmic negativity must flag.

use trichain::measures::{log_negativity, reduce_two_mode, simon_witness};
use trichain::model::{presets, SpectralKind};
use trichain::{Engine, Site};

#[test]
fn entangled_states_always_trip_the_witness() {
    for grad in [-0.95, -0.5, 0.0, 0.5, 1.5] {
        let cfg = presets::detuned_chain(SpectralKind::Ohmic, grad)
            .build()
            .unwrap();
        let v = Engine::new(cfg).unwrap().covariance().unwrap();
        for (i, j) in [
            (Site::Left, Site::Right),
            (Site::Left, Site::Center),
            (Site::Right, Site::Center),
        ] {
            let st = reduce_two_mode(&v, i, j).unwrap();
            let en = log_negativity(&st).unwrap();
            let (value, flag) = simon_witness(&st);
            if en > 1e-9 {
                assert!(
                    flag,
                    "gradient {grad}, pair {i:?},{j:?}: E_N = {en} but witness = {value}"
                );
            }
        }
    }
}
