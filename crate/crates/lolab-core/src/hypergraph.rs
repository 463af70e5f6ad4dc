//! 3-uniform hypergraph instances: LO colouring checks, an exact solver,
//! planted instances and the gadget reduction to `(LO_3, LO_4)`.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Vertices are `0..vertices` here; the text format shifts them to 1-based.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Hypergraph3 {
    vertices: usize,
    edges: Vec<[usize; 3]>,
}

impl Hypergraph3 {
    pub fn new(vertices: usize, edges: Vec<[usize; 3]>) -> Result<Self> {
        for e in &edges {
            if let Some(&v) = e.iter().find(|&&v| v >= vertices) {
                return Err(Error::VertexOutOfRange { vertex: v + 1, count: vertices });
            }
        }
        Ok(Hypergraph3 { vertices, edges })
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[[usize; 3]] {
        &self.edges
    }

    /// Incident edge indices per vertex, an edge listed once per vertex.
    fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.vertices];
        for (i, e) in self.edges.iter().enumerate() {
            for (k, &v) in e.iter().enumerate() {
                if !e[..k].contains(&v) {
                    inc[v].push(i);
                }
            }
        }
        inc
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Assignment(pub Vec<u8>);

impl Assignment {
    pub fn colours(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The first `len` colours.
    pub fn restrict(&self, len: usize) -> Assignment {
        Assignment(self.0[..len.min(self.0.len())].to_vec())
    }
}

/// The maximum occurs exactly once.
pub fn is_lo_triple(a: u8, b: u8, c: u8) -> bool {
    let m = a.max(b).max(c);
    (a == m) as u8 + (b == m) as u8 + (c == m) as u8 == 1
}

fn check_levels(levels: usize) -> Result<()> {
    if (2..=16).contains(&levels) {
        Ok(())
    } else {
        Err(Error::LevelsOutOfRange(levels))
    }
}

/// Index of the first edge whose colours are not in `LO_levels`, or `None`.
pub fn verify_lo(h: &Hypergraph3, levels: usize, a: &Assignment) -> Result<Option<usize>> {
    check_levels(levels)?;
    if a.len() != h.vertices {
        return Err(Error::AssignmentLength { expected: h.vertices, found: a.len() });
    }
    if let Some((v, &c)) = a.0.iter().enumerate().find(|(_, &c)| c as usize >= levels) {
        return Err(Error::ColourOutOfRange { vertex: v + 1, colour: c, levels: levels as u8 });
    }
    Ok(h.edges.iter().position(|&[x, y, z]| !is_lo_triple(a.0[x], a.0[y], a.0[z])))
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SolveOutcome {
    Solved(Assignment),
    Unsat,
    Budget,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Solve {
    pub outcome: SolveOutcome,
    pub nodes: u64,
}

struct Solver<'a> {
    h: &'a Hypergraph3,
    incidence: Vec<Vec<usize>>,
    order: Vec<usize>,
    full: u32,
    nodes: u64,
    budget: u64,
}

impl Solver<'_> {
    /// Prunes unsupported colours from the vertices of edge `e`, pushing the
    /// vertices whose domain shrank. `false` on a wipe-out.
    fn revise(&self, dom: &mut [u32], e: usize, changed: &mut Vec<usize>) -> bool {
        let edge = self.h.edges[e];
        let mut vars = [0usize; 3];
        let mut k = 0;
        for &v in &edge {
            if !vars[..k].contains(&v) {
                vars[k] = v;
                k += 1;
            }
        }
        let slot = |v: usize| vars[..k].iter().position(|&u| u == v).expect("edge vertex");
        let slots = [slot(edge[0]), slot(edge[1]), slot(edge[2])];
        let mut support = [0u32; 3];
        let mut vals = [0u8; 3];
        let mut stack = [0u32; 3];
        // iterate the product of the distinct vertices' domains
        stack[0] = dom[vars[0]];
        let mut depth = 0;
        loop {
            if stack[depth] == 0 {
                if depth == 0 {
                    break;
                }
                depth -= 1;
                continue;
            }
            let c = stack[depth].trailing_zeros() as u8;
            stack[depth] &= stack[depth] - 1;
            vals[depth] = c;
            if depth + 1 < k {
                depth += 1;
                stack[depth] = dom[vars[depth]];
                continue;
            }
            if is_lo_triple(vals[slots[0]], vals[slots[1]], vals[slots[2]]) {
                for i in 0..k {
                    support[i] |= 1 << vals[i];
                }
            }
        }
        for i in 0..k {
            let v = vars[i];
            if support[i] != dom[v] {
                dom[v] = support[i];
                if support[i] == 0 {
                    return false;
                }
                changed.push(v);
            }
        }
        true
    }

    fn propagate(&self, dom: &mut [u32], mut queue: Vec<usize>) -> bool {
        let mut queued = vec![false; self.h.edges.len()];
        for &e in &queue {
            queued[e] = true;
        }
        let mut changed = Vec::new();
        while let Some(e) = queue.pop() {
            queued[e] = false;
            changed.clear();
            if !self.revise(dom, e, &mut changed) {
                return false;
            }
            for &v in &changed {
                for &f in &self.incidence[v] {
                    if !queued[f] {
                        queued[f] = true;
                        queue.push(f);
                    }
                }
            }
        }
        true
    }

    /// `Some(true)` solved into `dom`, `Some(false)` exhausted, `None` out of budget.
    fn search(&mut self, dom: &mut Vec<u32>, from: usize) -> Option<bool> {
        let Some(pos) = (from..self.order.len()).find(|&i| dom[self.order[i]].count_ones() > 1) else {
            return Some(true);
        };
        let v = self.order[pos];
        let mut values = dom[v];
        while values != 0 {
            if self.nodes >= self.budget {
                return None;
            }
            self.nodes += 1;
            let c = values.trailing_zeros();
            values &= values - 1;
            let mut next = dom.clone();
            next[v] = 1 << c;
            if self.propagate(&mut next, self.incidence[v].clone()) {
                match self.search(&mut next, pos + 1) {
                    Some(true) => {
                        *dom = next;
                        return Some(true);
                    }
                    Some(false) => {}
                    None => return None,
                }
            }
        }
        Some(false)
    }
}

/// Backtracking over vertices by descending degree, smallest colour first,
/// with arc consistency on every edge. Solutions are verified before return.
pub fn solve_lo_exact(h: &Hypergraph3, levels: usize, budget: u64) -> Result<Solve> {
    check_levels(levels)?;
    let incidence = h.incidence();
    let mut order: Vec<usize> = (0..h.vertices).collect();
    order.sort_by_key(|&v| core::cmp::Reverse(incidence[v].len()));
    let full = (1u32 << levels) - 1;
    let mut solver = Solver { h, incidence, order, full, nodes: 0, budget };
    let mut dom = vec![solver.full; h.vertices];
    let outcome = if !solver.propagate(&mut dom, (0..h.edges.len()).collect()) {
        SolveOutcome::Unsat
    } else {
        match solver.search(&mut dom, 0) {
            Some(true) => {
                let a = Assignment(dom.iter().map(|d| d.trailing_zeros() as u8).collect());
                debug_assert!(a.0.iter().all(|&c| (c as usize) < levels));
                if let Some(e) = verify_lo(h, levels, &a)? {
                    unreachable!("solver returned an assignment violating edge {e}");
                }
                SolveOutcome::Solved(a)
            }
            Some(false) => SolveOutcome::Unsat,
            None => SolveOutcome::Budget,
        }
    };
    Ok(Solve { outcome, nodes: solver.nodes })
}

/// Adds a vertex `x + V` for every `x` and appends the edges `(x, x, x + V)`.
pub fn gadget_reduce(h: &Hypergraph3) -> Hypergraph3 {
    let n = h.vertices;
    let mut edges = h.edges.clone();
    edges.extend((0..n).map(|x| [x, x, x + n]));
    Hypergraph3 { vertices: 2 * n, edges }
}

/// A random instance with a hidden LO_2 colouring: each edge has one
/// 1-vertex and two distinct 0-vertices, in random positions.
pub fn plant_lo2(vertices: usize, edges: usize, seed: u64) -> Result<(Hypergraph3, Assignment)> {
    if vertices < 3 {
        return Err(Error::InsufficientVertices(vertices));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut colours: Vec<u8> = (0..vertices).map(|_| rng.random_bool(1.0 / 3.0) as u8).collect();
    if !colours.contains(&1) {
        let v = rng.random_range(0..vertices);
        colours[v] = 1;
    }
    while colours.iter().filter(|&&c| c == 0).count() < 2 {
        let ones: Vec<usize> = (0..vertices).filter(|&v| colours[v] == 1).collect();
        colours[ones[rng.random_range(0..ones.len())]] = 0;
    }
    let ones: Vec<usize> = (0..vertices).filter(|&v| colours[v] == 1).collect();
    let zeros: Vec<usize> = (0..vertices).filter(|&v| colours[v] == 0).collect();
    let mut out = Vec::with_capacity(edges);
    for _ in 0..edges {
        let one = ones[rng.random_range(0..ones.len())];
        let a = rng.random_range(0..zeros.len());
        let mut b = rng.random_range(0..zeros.len() - 1);
        if b >= a {
            b += 1;
        }
        let mut e = [one, zeros[a], zeros[b]];
        for i in (1..3).rev() {
            e.swap(i, rng.random_range(0..=i));
        }
        out.push(e);
    }
    Ok((Hypergraph3 { vertices, edges: out }, Assignment(colours)))
}
