use std::collections::HashMap;
use std::sync::Arc;

use mixlab::instances::graph_iso::GraphIsoMixer;
use mixlab::instances::offset::OffsetMixer;
use mixlab::instances::{
    is_label_consistent, make_coset_mixer, make_graph_iso_mixer, make_grover_mixer, make_layered_instance,
    make_offset_mixer, GroverStep, Hiding, LayeredVariant, PointFunction,
};
use mixlab::verify::{
    first_round_trip_failure, full_connectivity_witness, verify_instant_mixing, verify_no_cross_mixing,
};
use mixlab::{Bits, GroundTruthPartition, Mixer, MixerOracle, QuerySession};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn offset(n: u32, comps: Vec<Vec<u64>>) -> (MixerOracle, GroundTruthPartition) {
    let t = GroundTruthPartition::from_components(n, comps).unwrap();
    (make_offset_mixer(&t).unwrap(), t)
}

#[test]
fn sample_s_is_uniform_over_five_elements() {
    let (m, _) = offset(3, vec![vec![0, 2, 3], vec![5, 6]]);
    let mut session = QuerySession::new(&m);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut freq: HashMap<u64, u64> = HashMap::new();
    for _ in 0..100_000 {
        *freq.entry(session.sample_s(&mut rng).unwrap().value()).or_default() += 1;
    }
    assert_eq!(session.counts().sample_s, 100_000);
    let mut chi2 = 0.0;
    for x in [0, 2, 3, 5, 6] {
        let f = freq[&x] as f64 / 100_000.0;
        assert!((f - 0.2).abs() < 0.01, "{x}: {f}");
        chi2 += (freq[&x] as f64 - 20_000.0).powi(2) / 20_000.0;
    }
    assert_eq!(freq.len(), 5);
    // chi-square, 4 degrees of freedom, 1% critical value
    assert!(chi2 < 13.277, "chi2 {chi2}");
}

#[test]
fn singleton_s_always_samples_its_element() {
    let (m, _) = offset(2, vec![vec![3]]);
    let mut session = QuerySession::new(&m);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        assert_eq!(session.sample_s(&mut rng).unwrap().value(), 3);
        assert_eq!(session.sample_ind(&mut rng).unwrap().value(), m.identity_index());
    }
}

#[test]
fn offset_index_set() {
    let t = Arc::new(GroundTruthPartition::from_components(3, vec![vec![0, 1, 2], vec![4, 6]]).unwrap());
    let mixer = OffsetMixer::new(t.clone()).unwrap();
    assert_eq!(mixer.index_count(), 6);
    let zero = mixer.encode(&[0, 0]);
    for x in [0, 1, 2, 4, 6] {
        assert_eq!(mixer.apply(zero, x), x);
    }
    let m = MixerOracle::new(mixer);
    let mut session = QuerySession::new(&m);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut freq: HashMap<u64, u64> = HashMap::new();
    for _ in 0..60_000 {
        *freq.entry(session.sample_ind(&mut rng).unwrap().value()).or_default() += 1;
    }
    assert_eq!(freq.len(), 6);
    for c in freq.values() {
        assert!((*c as f64 / 60_000.0 - 1.0 / 6.0).abs() < 0.01);
    }
    for i in m.indices() {
        assert!(session.test_membership_ind(Bits::new(i, m.index_width()).unwrap()).unwrap());
    }
    // offset 3 in a size-3 component is out of range
    let bad = OffsetMixer::new(t).unwrap().encode(&[3, 0]);
    assert!(!session.test_membership_ind(Bits::new(bad, m.index_width()).unwrap()).unwrap());
    assert_eq!(verify_instant_mixing(&m, &offset(3, vec![vec![0, 1, 2], vec![4, 6]]).1, 0).max_tv, 0.0);
}

#[test]
fn graph_iso_indices() {
    let raw = GraphIsoMixer::new(3).unwrap();
    let (m, t) = make_graph_iso_mixer(3).unwrap();
    let mut session = QuerySession::new(&m);
    let not_perm = raw.encode_permutation(&[0, 0, 1]);
    assert!(!session.test_membership_ind(Bits::new(not_perm, m.index_width()).unwrap()).unwrap());
    let id = raw.encode_permutation(&[0, 1, 2]);
    assert!(session.test_membership_ind(Bits::new(id, m.index_width()).unwrap()).unwrap());
    for x in 0..8 {
        assert_eq!(m.apply(id, x), x);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut freq: HashMap<u64, u64> = HashMap::new();
    for _ in 0..100_000 {
        *freq.entry(session.sample_ind(&mut rng).unwrap().value()).or_default() += 1;
    }
    assert_eq!(freq.len(), 6);
    for c in freq.values() {
        assert!((*c as f64 / 100_000.0 - 1.0 / 6.0).abs() < 0.01);
    }
    let mut sizes = t.component_sizes();
    sizes.sort();
    assert_eq!(sizes, vec![1, 1, 3, 3]);
    assert_eq!(verify_instant_mixing(&m, &t, 0).max_tv, 0.0);
}

#[test]
fn coset_components() {
    let (_, t) = make_coset_mixer(8, &[2]).unwrap();
    assert_eq!(t.components(), [vec![0, 2, 4, 6], vec![1, 3, 5, 7]]);
    let (_, t) = make_coset_mixer(8, &[1]).unwrap();
    assert_eq!(t.component_count(), 1);
    let (m, t) = make_coset_mixer(6, &[]).unwrap();
    assert_eq!(t.component_count(), 6);
    assert_eq!(m.index_count(), 1);
}

#[test]
fn grover_examples() {
    let (m, t) = make_grover_mixer(PointFunction::zero(3), GroverStep::Additive).unwrap();
    assert_eq!(t.component_count(), 1);
    for i in 0..8 {
        for x in 0..8 {
            assert_eq!(m.apply(i, x), (x + i) % 8);
        }
    }
    let (m, t) = make_grover_mixer(PointFunction::point(3, 5).unwrap(), GroverStep::Additive).unwrap();
    assert_eq!(t.component_containing(5).unwrap(), &[5]);
    let mut session = QuerySession::new(&m);
    let out = session.apply(Bits::new(1, 3).unwrap(), Bits::new(4, 3).unwrap()).unwrap();
    assert_eq!(out.value(), 4);
    assert_eq!(session.counts().g_queries, 2);
    let r = verify_instant_mixing(&m, &t, 0);
    assert!(r.exact && r.max_tv > 0.0);
}

#[test]
fn point_function_breaks_additive_injectivity_but_not_xor() {
    let (m, _) = make_grover_mixer(PointFunction::point(3, 4).unwrap(), GroverStep::Additive).unwrap();
    assert!(first_round_trip_failure(&m).is_some());
    let (m, t) = make_grover_mixer(PointFunction::point(3, 4).unwrap(), GroverStep::Xor).unwrap();
    assert!(first_round_trip_failure(&m).is_none());
    assert!(verify_no_cross_mixing(&m, &t));
}

#[derive(Debug)]
struct Leaky(MixerOracle);

impl Mixer for Leaky {
    fn element_width(&self) -> u32 {
        self.0.n()
    }
    fn index_width(&self) -> u32 {
        self.0.index_width()
    }
    fn element_count(&self) -> u64 {
        self.0.element_count()
    }
    fn element_at(&self, ordinal: u64) -> u64 {
        self.0.inner().element_at(ordinal)
    }
    fn contains(&self, x: u64) -> bool {
        self.0.contains(x)
    }
    fn index_count(&self) -> u64 {
        self.0.index_count()
    }
    fn index_at(&self, ordinal: u64) -> u64 {
        self.0.inner().index_at(ordinal)
    }
    fn index_ordinal(&self, i: u64) -> Option<u64> {
        self.0.inner().index_ordinal(i)
    }
    fn apply(&self, i: u64, x: u64) -> u64 {
        // one crossing pair: 0 and 4 trade places under the last index
        match (i == self.index_at(self.index_count() - 1), x) {
            (true, 0) => 4,
            (true, 4) => 0,
            _ => self.0.apply(i, x),
        }
    }
    fn apply_inverse(&self, i: u64, x: u64) -> u64 {
        self.apply(i, x)
    }
}

#[test]
fn injected_crossing_is_detected() {
    let (m, t) = offset(3, vec![vec![0], vec![4]]);
    assert!(verify_no_cross_mixing(&m, &t));
    let leaky = MixerOracle::new(Leaky(m));
    assert!(!verify_no_cross_mixing(&leaky, &t));
}

#[test]
fn connectivity_witnesses() {
    let (m, t) = offset(3, vec![vec![0, 3, 5], vec![1, 6]]);
    assert_eq!(full_connectivity_witness(&m, &t, 3, 3).unwrap(), Some(m.identity_index()));
    let i = full_connectivity_witness(&m, &t, 0, 5).unwrap().unwrap();
    assert_eq!(m.apply(i, 0), 5);
    assert_eq!(full_connectivity_witness(&m, &t, 0, 6).unwrap(), None);
    assert!(full_connectivity_witness(&m, &t, 0, 7).is_err());
}

#[test]
fn apply_rejects_bad_arguments() {
    let (m, _) = offset(3, vec![vec![0, 3, 5]]);
    let mut session = QuerySession::new(&m);
    let i = Bits::new(m.identity_index(), m.index_width()).unwrap();
    assert!(session.apply(i, Bits::new(2, 3).unwrap()).is_err());
    assert!(session.apply(i, Bits::new(3, 2).unwrap()).is_err());
    assert_eq!(session.apply(i, Bits::new(3, 3).unwrap()).unwrap().value(), 3);
}

fn layered_base() -> (MixerOracle, GroundTruthPartition) {
    // S_1 = {00, 01}, S_2 = {10}, garbage {11}
    offset(2, vec![vec![0, 1], vec![2]])
}

#[test]
fn layered_labels() {
    let (base, t) = layered_base();
    let row0 = make_layered_instance(&base, &t, 0, LayeredVariant::Row0).unwrap();
    let merged = row0.label().label(0);
    for z in 0..4 {
        assert_eq!(row0.label().label(z), merged);
    }
    for x in 4..16 {
        assert_eq!(row0.label().label(x), x);
    }
    assert!(!row0.label_valid());

    let row3 = make_layered_instance(&base, &t, 0, LayeredVariant::Row(3)).unwrap();
    let i = row3.mixer().indices().nth(1).unwrap();
    let z = 2;
    assert_eq!(row3.split(row3.mixer().apply(i, (3 << 2) | z)), (3, base.apply(i >> 1, z)));
    assert_eq!(row3.label().label((3 << 2) | z), merged);
    assert!(!row3.label_valid());

    let nowhere = make_layered_instance(&base, &t, 0, LayeredVariant::Nowhere).unwrap();
    assert!(nowhere.label_valid());
    assert!(is_label_consistent(nowhere.label(), nowhere.truth()));

    let single = offset(2, vec![vec![0, 1, 2, 3]]);
    let inst = make_layered_instance(&single.0, &single.1, 1, LayeredVariant::Row0).unwrap();
    assert!(inst.label_valid());
}

#[test]
fn zero_grover_embedding_is_nowhere() {
    for n in 1..=2u32 {
        let t = GroundTruthPartition::from_components(n, vec![vec![0], (1..1u64 << n).collect()]).unwrap();
        let base = make_offset_mixer(&t).unwrap();
        let g = make_layered_instance(&base, &t, 0, LayeredVariant::Grover(PointFunction::zero(n))).unwrap();
        let w = make_layered_instance(&base, &t, 0, LayeredVariant::Nowhere).unwrap();
        assert_eq!(g.truth(), w.truth());
        for x in 0..1u64 << (2 * n) {
            assert_eq!(g.label().label(x), w.label().label(x));
            for i in g.mixer().indices() {
                assert_eq!(g.mixer().apply(i, x), w.mixer().apply(i, x));
            }
        }
    }
}

#[test]
fn hiding_round_trip() {
    let (base, t) = layered_base();
    let inst = make_layered_instance(&base, &t, 0, LayeredVariant::Row(1)).unwrap();
    let same = inst.hide_with(&Hiding::identity(4)).unwrap();
    for x in 0..16 {
        assert_eq!(same.label().label(x), inst.label().label(x));
        for i in inst.mixer().indices() {
            assert_eq!(same.mixer().apply(i, x), inst.mixer().apply(i, x));
        }
    }
    let h = Hiding::random(4, &mut ChaCha8Rng::seed_from_u64(9));
    let hidden = inst.hide_with(&h).unwrap();
    assert!(verify_no_cross_mixing(hidden.mixer(), hidden.truth()));
    assert_eq!(hidden.start(), h.pi(inst.start()));
    for x in 0..16 {
        assert_eq!(h.sigma_inv(hidden.label().label(h.pi(x))), inst.label().label(x));
        for i in inst.mixer().indices() {
            assert_eq!(h.pi_inv(hidden.mixer().apply(i, h.pi(x))), inst.mixer().apply(i, x));
        }
    }
}
