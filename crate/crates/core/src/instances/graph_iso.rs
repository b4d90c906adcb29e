//! Graph-isomorphism mixers on small vertex counts.
//!
//! Elements are simple graphs on `v` vertices written as upper-triangular
//! adjacency bits in row-major order: edge (0,1) is the most significant
//! bit, then (0,2), ..., (0,v-1), (1,2), and so on. Indices are vertex
//! permutations, each image packed in `ceil(log2 v)` bits with vertex 0's
//! image most significant. Components are isomorphism classes.

use std::collections::HashMap;

use crate::bits::width_for;
use crate::error::{invalid, Result};
use crate::oracle::{Mixer, MixerOracle};
use crate::partition::GroundTruthPartition;

pub const MAX_VERTICES: usize = 5;

#[derive(Debug)]
pub struct GraphIsoMixer {
    vertices: usize,
    edges: u32,
    vertex_width: u32,
    codes: Vec<u64>,
    ordinal_of: HashMap<u64, u64>,
    /// For permutation ordinal p, `edge_image[p][k]` is the bit position that
    /// edge k moves to.
    edge_image: Vec<Vec<u32>>,
    edge_preimage: Vec<Vec<u32>>,
}

/// Bit position (counted from the least significant end) of edge `{a, b}`.
fn edge_bit(v: usize, a: usize, b: usize) -> u32 {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    let n = v * (v - 1) / 2;
    // Row-major rank of (a, b) among pairs with a < b.
    let rank = a * (2 * v - a - 1) / 2 + (b - a - 1);
    (n - 1 - rank) as u32
}

fn permutations(v: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..used.len() {
            if !used[k] {
                used[k] = true;
                prefix.push(k);
                rec(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; v], &mut out);
    out
}

impl GraphIsoMixer {
    pub fn new(vertices: usize) -> Result<Self> {
        if !(2..=MAX_VERTICES).contains(&vertices) {
            return Err(invalid(format!(
                "graph-iso mixers support 2..={MAX_VERTICES} vertices, got {vertices}"
            )));
        }
        let v = vertices;
        let edges = (v * (v - 1) / 2) as u32;
        let vertex_width = width_for(v as u64);
        let perms = permutations(v);
        let encode = |p: &[usize]| {
            p.iter()
                .fold(0u64, |acc, &img| (acc << vertex_width) | img as u64)
        };
        let codes: Vec<u64> = perms.iter().map(|p| encode(p)).collect();
        let ordinal_of = codes.iter().enumerate().map(|(k, &c)| (c, k as u64)).collect();
        let mut edge_image = Vec::with_capacity(perms.len());
        let mut edge_preimage = Vec::with_capacity(perms.len());
        for p in &perms {
            let mut fwd = vec![0u32; edges as usize];
            let mut back = vec![0u32; edges as usize];
            for a in 0..v {
                for b in a + 1..v {
                    let from = edge_bit(v, a, b);
                    let to = edge_bit(v, p[a], p[b]);
                    fwd[from as usize] = to;
                    back[to as usize] = from;
                }
            }
            edge_image.push(fwd);
            edge_preimage.push(back);
        }
        Ok(GraphIsoMixer { vertices, edges, vertex_width, codes, ordinal_of, edge_image, edge_preimage })
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    /// Index encoding of a vertex permutation given as image list.
    pub fn encode_permutation(&self, images: &[usize]) -> u64 {
        images
            .iter()
            .fold(0u64, |acc, &img| (acc << self.vertex_width) | img as u64)
    }

    fn permute(table: &[u32], g: u64) -> u64 {
        table
            .iter()
            .enumerate()
            .filter(|&(from, _)| (g >> from) & 1 == 1)
            .fold(0u64, |acc, (_, &to)| acc | (1u64 << to))
    }

    fn ordinal(&self, i: u64) -> usize {
        self.ordinal_of[&i] as usize
    }
}

impl Mixer for GraphIsoMixer {
    fn element_width(&self) -> u32 {
        self.edges
    }

    fn index_width(&self) -> u32 {
        self.vertex_width * self.vertices as u32
    }

    fn element_count(&self) -> u64 {
        1u64 << self.edges
    }

    fn element_at(&self, ordinal: u64) -> u64 {
        ordinal
    }

    fn contains(&self, x: u64) -> bool {
        x >> self.edges == 0
    }

    fn index_count(&self) -> u64 {
        self.codes.len() as u64
    }

    fn index_at(&self, ordinal: u64) -> u64 {
        self.codes[ordinal as usize]
    }

    fn index_ordinal(&self, i: u64) -> Option<u64> {
        self.ordinal_of.get(&i).copied()
    }

    fn apply(&self, i: u64, x: u64) -> u64 {
        Self::permute(&self.edge_image[self.ordinal(i)], x)
    }

    fn apply_inverse(&self, i: u64, x: u64) -> u64 {
        Self::permute(&self.edge_preimage[self.ordinal(i)], x)
    }
}

/// Mixer over all graphs on `v` vertices with ground truth from orbit
/// enumeration (canonical form = least image under all permutations).
pub fn make_graph_iso_mixer(v: usize) -> Result<(MixerOracle, GroundTruthPartition)> {
    let mixer = GraphIsoMixer::new(v)?;
    let n = mixer.edges;
    let truth = GroundTruthPartition::from_classifier(n, 0..1u64 << n, |g| {
        mixer
            .edge_image
            .iter()
            .map(|t| GraphIsoMixer::permute(t, g))
            .min()
            .unwrap()
    })?;
    Ok((MixerOracle::new(mixer), truth))
}
