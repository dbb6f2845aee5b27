use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rfgrowth::groupfile::{catalog, CATALOG};
use rfgrowth::mgroup::{ball, GroupElement, DEFAULT_BALL_BUDGET};

#[test]
fn random_triples_from_the_ball() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for (name, _) in CATALOG {
        let g = catalog(name).unwrap();
        let b = ball(&g, 4, DEFAULT_BALL_BUDGET).unwrap();
        let els: Vec<&GroupElement> = b.elements().collect();
        let e = g.identity();
        for _ in 0..1000 {
            let x = *els.choose(&mut rng).unwrap();
            let y = *els.choose(&mut rng).unwrap();
            let z = *els.choose(&mut rng).unwrap();
            let xy = g.multiply(x, y).unwrap();
            let yz = g.multiply(y, z).unwrap();
            assert_eq!(g.multiply(&xy, z).unwrap(), g.multiply(x, &yz).unwrap(), "{name}");
            assert_eq!(g.multiply(x, &g.invert(x).unwrap()).unwrap(), e, "{name}");
            assert_eq!(g.multiply(&e, x).unwrap(), *x, "{name}");
            assert_eq!(g.power(x, -3).unwrap(), g.invert(&g.power(x, 3).unwrap()).unwrap(), "{name}");
        }
        for rel in &g.relators {
            assert!(g.word(rel).unwrap().is_identity(), "{name}: relator {rel:?}");
        }
    }
}

#[test]
fn ball_is_closed_under_inverse_and_norms_are_consistent() {
    for (name, _) in CATALOG {
        let g = catalog(name).unwrap();
        let b = ball(&g, 3, DEFAULT_BALL_BUDGET).unwrap();
        for (r, sphere) in b.spheres.iter().enumerate() {
            for x in sphere {
                assert_eq!(b.norm(&g.invert(x).unwrap()), Some(r), "{name}");
            }
        }
        for s in &g.generators {
            assert_eq!(b.norm(s), Some(1), "{name}");
        }
    }
}
