//! Dense undirected graphs on `0..n` stored as bit rows.
//!
//! Each vertex owns `words` 64-bit blocks, so neighbourhood intersections and
//! degree counts are word-parallel. Labels are 0-based; anything printed for
//! humans goes through [`label`] to become 1-based.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest order accepted by the decoders.
pub const MAX_ORDER: usize = 1 << 16;

#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

/// 1-based label for user-facing output.
#[inline]
pub fn label(v: usize) -> usize {
    v + 1
}

/// A subset of `0..n` as a bitmask.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    n: usize,
    bits: Vec<u64>,
}

impl VertexSet {
    pub fn new(n: usize) -> Self {
        VertexSet {
            n,
            bits: vec![0; words_for(n)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::new(n);
        for w in s.bits.iter_mut() {
            *w = !0;
        }
        s.trim();
        s
    }

    pub fn from_iter<I: IntoIterator<Item = usize>>(n: usize, it: I) -> Self {
        let mut s = Self::new(n);
        for v in it {
            s.insert(v);
        }
        s
    }

    pub(crate) fn from_words(n: usize, bits: Vec<u64>) -> Self {
        debug_assert_eq!(bits.len(), words_for(n));
        let mut s = VertexSet { n, bits };
        s.trim();
        s
    }

    fn trim(&mut self) {
        let r = self.n % 64;
        if r != 0 {
            if let Some(last) = self.bits.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    /// Size of the ground range.
    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> &[u64] {
        &self.bits
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        v < self.n && (self.bits[v >> 6] >> (v & 63)) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, v: usize) {
        assert!(v < self.n, "vertex {v} out of range 0..{}", self.n);
        self.bits[v >> 6] |= 1 << (v & 63);
    }

    #[inline]
    pub fn remove(&mut self, v: usize) {
        if v < self.n {
            self.bits[v >> 6] &= !(1 << (v & 63));
        }
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn iter(&self) -> BitIter<'_> {
        BitIter::new(&self.bits)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn intersect(&self, other: &VertexSet) -> VertexSet {
        let bits = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| a & b)
            .collect();
        VertexSet { n: self.n, bits }
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let bits = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| a | b)
            .collect();
        VertexSet { n: self.n, bits }
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        let bits = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| a & !b)
            .collect();
        VertexSet { n: self.n, bits }
    }

    pub fn complement(&self) -> VertexSet {
        let bits = self.bits.iter().map(|a| !a).collect();
        VertexSet::from_words(self.n, bits)
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & b == 0)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    /// `|self ∩ row|` for a raw row of the same width.
    #[inline]
    pub fn count_in(&self, row: &[u64]) -> usize {
        and_count(&self.bits, row)
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for VertexSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

/// Iterator over the set bits of a word slice.
pub struct BitIter<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl<'a> BitIter<'a> {
    pub fn new(words: &'a [u64]) -> Self {
        BitIter {
            words,
            idx: 0,
            cur: words.first().copied().unwrap_or(0),
        }
    }
}

impl Iterator for BitIter<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let t = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * 64 + t);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}

#[inline]
pub(crate) fn and_count(a: &[u64], b: &[u64]) -> usize {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x & y).count_ones() as usize)
        .sum()
}

/// Dense simple graph on `0..n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn new(n: usize) -> Self {
        let words = words_for(n);
        Graph {
            n,
            words,
            rows: vec![0; n * words],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::new(n);
        for i in 0..n {
            g.add_edge(i, (i + 1) % n);
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Self::new(n);
        for i in 1..n {
            g.add_edge(i - 1, i);
        }
        g
    }

    /// Complete bipartite graph with parts `0..a` and `a..a+b`.
    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let mut g = Self::new(a + b);
        for u in 0..a {
            for v in a..a + b {
                g.add_edge(u, v);
            }
        }
        g
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of 64-bit words per row.
    #[inline]
    pub fn words(&self) -> usize {
        self.words
    }

    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.words..(v + 1) * self.words]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        (self.rows[u * self.words + (v >> 6)] >> (v & 63)) & 1 == 1
    }

    /// Adds `uv`. Self-loops are ignored.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.n && v < self.n, "edge ({u},{v}) out of range");
        if u == v {
            return;
        }
        self.rows[u * self.words + (v >> 6)] |= 1 << (v & 63);
        self.rows[v * self.words + (u >> 6)] |= 1 << (u & 63);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.rows[u * self.words + (v >> 6)] &= !(1 << (v & 63));
        self.rows[v * self.words + (u >> 6)] &= !(1 << (u & 63));
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|w| w.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> BitIter<'_> {
        BitIter::new(self.row(v))
    }

    pub fn neighborhood(&self, v: usize) -> VertexSet {
        VertexSet::from_words(self.n, self.row(v).to_vec())
    }

    /// Edges `(u, v)` with `u < v`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.neighbors(u).filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// Number of neighbours of `v` inside `s`.
    #[inline]
    pub fn degree_in(&self, v: usize, s: &VertexSet) -> usize {
        and_count(self.row(v), s.words())
    }

    pub fn complement(&self) -> Graph {
        let mut g = Graph::new(self.n);
        let full = VertexSet::full(self.n);
        for v in 0..self.n {
            let dst = &mut g.rows[v * self.words..(v + 1) * self.words];
            for (i, d) in dst.iter_mut().enumerate() {
                *d = !self.rows[v * self.words + i] & full.bits[i];
            }
            dst[v >> 6] &= !(1 << (v & 63));
        }
        g
    }

    /// Subgraph induced by `s`, relabelled in ascending order of original labels.
    pub fn induced_subgraph(&self, s: &VertexSet) -> Graph {
        let verts = s.to_vec();
        let mut g = Graph::new(verts.len());
        for (i, &u) in verts.iter().enumerate() {
            for (j, &v) in verts.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// Graph with `perm[i]` adjacent to `perm[j]` exactly when `i` is adjacent to `j`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n);
        let mut g = Graph::new(self.n);
        for (u, v) in self.edges() {
            g.add_edge(perm[u], perm[v]);
        }
        g
    }

    pub fn is_clique(&self, s: &VertexSet) -> bool {
        let k = s.len();
        s.iter().all(|v| self.degree_in(v, s) == k - 1)
    }

    pub fn is_stable(&self, s: &VertexSet) -> bool {
        s.iter().all(|v| self.degree_in(v, s) == 0)
    }

    pub fn is_complete(&self) -> bool {
        self.edge_count() == self.n * self.n.saturating_sub(1) / 2
    }

    pub fn min_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn to_graph6(&self) -> String {
        graph6_encode(self)
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            n: self.n,
            edges: self.edges().map(|(u, v)| [u, v]).collect(),
        }
    }

    pub fn from_json(j: &GraphJson) -> Result<Graph> {
        if j.n > MAX_ORDER {
            return Err(Error::scale("graph order", j.n, MAX_ORDER));
        }
        let mut g = Graph::new(j.n);
        for &[u, v] in &j.edges {
            if u >= v || v >= j.n {
                return Err(Error::invalid(format!(
                    "edge [{u},{v}] must satisfy u < v < n = {}",
                    j.n
                )));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, {})", self.n, graph6_encode(self))
    }
}

/// JSON edge list: `{"n": .., "edges": [[u, v], ..]}` with `u < v`, 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

fn push_order(out: &mut Vec<u8>, n: usize) {
    if n <= 62 {
        out.push(n as u8 + 63);
    } else if n <= 258_047 {
        out.push(126);
        for shift in [12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    } else {
        out.push(126);
        out.push(126);
        for shift in [30, 24, 18, 12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    }
}

/// graph6 encoding of `g`, without a trailing newline.
pub fn graph6_encode(g: &Graph) -> String {
    let n = g.n;
    let mut out = Vec::with_capacity(8 + (n * n.saturating_sub(1) / 2).div_ceil(6));
    push_order(&mut out, n);
    let mut acc = 0u8;
    let mut nbits = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | g.has_edge(i, j) as u8;
            nbits += 1;
            if nbits == 6 {
                out.push(acc + 63);
                acc = 0;
                nbits = 0;
            }
        }
    }
    if nbits > 0 {
        out.push((acc << (6 - nbits)) + 63);
    }
    String::from_utf8(out).expect("graph6 output is ASCII")
}

fn g6_value(bytes: &[u8], at: usize) -> Result<u64> {
    match bytes.get(at) {
        None => Err(Error::Graph6 {
            offset: at,
            reason: "unexpected end of input".into(),
        }),
        Some(&b) if (63..=126).contains(&b) => Ok((b - 63) as u64),
        Some(&b) => Err(Error::Graph6 {
            offset: at,
            reason: format!("byte 0x{b:02x} outside the printable range 63..=126"),
        }),
    }
}

/// Decodes one graph6 string. An optional `>>graph6<<` header and a trailing
/// newline are accepted.
pub fn graph6_decode(input: &[u8]) -> Result<Graph> {
    let mut start = 0;
    const HEADER: &[u8] = b">>graph6<<";
    if input.starts_with(HEADER) {
        start = HEADER.len();
    }
    let mut end = input.len();
    while end > start && matches!(input[end - 1], b'\n' | b'\r') {
        end -= 1;
    }
    let bytes = &input[..end];
    let mut pos = start;
    let first = g6_value(bytes, pos)?;
    let n = if first < 63 {
        pos += 1;
        first as usize
    } else {
        let second = g6_value(bytes, pos + 1)?;
        let (digits, skip) = if second == 63 { (6, 2) } else { (3, 1) };
        let mut v = 0u64;
        for d in 0..digits {
            v = (v << 6) | g6_value(bytes, pos + skip + d)?;
        }
        pos += skip + digits;
        v as usize
    };
    if n > MAX_ORDER {
        return Err(Error::scale("graph order", n, MAX_ORDER));
    }
    let nbits = n * n.saturating_sub(1) / 2;
    let need = nbits.div_ceil(6);
    let have = bytes.len() - pos;
    if have != need {
        let offset = pos + have.min(need);
        return Err(Error::Graph6 {
            offset,
            reason: format!("expected {need} data bytes for n = {n}, found {have}"),
        });
    }
    let data: Vec<u8> = (pos..pos + need)
        .map(|at| g6_value(bytes, at).map(|v| v as u8))
        .collect::<Result<_>>()?;
    let mut g = Graph::new(n);
    let mut bit = 0usize;
    for j in 1..n {
        for i in 0..j {
            if (data[bit / 6] >> (5 - bit % 6)) & 1 == 1 {
                g.add_edge(i, j);
            }
            bit += 1;
        }
    }
    if nbits % 6 != 0 {
        let at = pos + need - 1;
        let val = g6_value(bytes, at)?;
        let pad = 6 - nbits % 6;
        if val & ((1 << pad) - 1) != 0 {
            return Err(Error::Graph6 {
                offset: at,
                reason: "nonzero padding bits".into(),
            });
        }
    }
    Ok(g)
}

/// Decodes every non-empty line of a graph6 file, reporting offsets relative
/// to the whole input.
pub fn graph6_decode_all(input: &[u8]) -> Result<Vec<Graph>> {
    let mut out = Vec::new();
    let mut base = 0;
    for line in input.split(|&b| b == b'\n') {
        let trimmed = line.strip_suffix(b"\r").unwrap_or(line);
        if !trimmed.is_empty() {
            out.push(graph6_decode(trimmed).map_err(|e| match e {
                Error::Graph6 { offset, reason } => Error::Graph6 {
                    offset: offset + base,
                    reason,
                },
                other => other,
            })?);
        }
        base += line.len() + 1;
    }
    Ok(out)
}
