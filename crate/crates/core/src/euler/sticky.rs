//! Event-driven sticky particles.
//!
//! Particles fly freely; when two neighbours meet they merge into one
//! particle carrying their total mass and momentum. Collision times are kept
//! in a priority queue and stale events are discarded by version stamps.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::LineGrid;
use crate::error::{Error, Result};
use crate::grid::XBoundary;
use crate::init::Profile;

/// Particles sorted by position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StickyParticles {
    pub x: Vec<f64>,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: f64,
}

impl StickyParticles {
    pub fn new(x: Vec<f64>, m: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if x.len() != m.len() || x.len() != v.len() || x.is_empty() {
            return Err(Error::InvalidInitialData("particle arrays must be nonempty and of equal length".into()));
        }
        if m.iter().any(|&mk| !(mk > 0.0)) {
            return Err(Error::InvalidInitialData("particle masses must be positive".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInitialData("particle positions must be strictly increasing".into()));
        }
        Ok(Self { x, m, v, t: 0.0 })
    }

    /// `per_cell` particles per cell of `grid`, at sub-cell midpoints, with
    /// the exact mass of `ρ₀` on each sub-cell and velocity `u₀` at its midpoint.
    /// Sub-cells without mass are skipped.
    pub fn from_profiles(rho0: &Profile, u0: &Profile, grid: &LineGrid, per_cell: usize) -> Result<Self> {
        let n = grid.nx * per_cell.max(1);
        let h = grid.length() / n as f64;
        let (mut x, mut m, mut v) = (vec![], vec![], vec![]);
        for k in 0..n {
            let a = grid.x_min + k as f64 * h;
            let mass = rho0.cell_average(a, a + h) * h;
            if mass < 0.0 {
                return Err(Error::InvalidInitialData(format!("rho0 negative near x = {a}")));
            }
            if mass > 0.0 {
                x.push(a + 0.5 * h);
                m.push(mass);
                v.push(u0.eval(a + 0.5 * h));
            }
        }
        Self::new(x, m, v)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Mass-weighted binning into the cells of `grid`: density and velocity.
    pub fn on_grid(&self, grid: &LineGrid) -> (Vec<f64>, Vec<f64>) {
        let dx = grid.dx();
        let mut mass = vec![0.0; grid.nx];
        let mut mom = vec![0.0; grid.nx];
        for k in 0..self.len() {
            let s = ((self.x[k] - grid.x_min) / dx).floor();
            if s < 0.0 || s >= grid.nx as f64 {
                continue;
            }
            let i = s as usize;
            mass[i] += self.m[k];
            mom[i] += self.m[k] * self.v[k];
        }
        let u = mass.iter().zip(&mom).map(|(&a, &b)| if a > 0.0 { b / a } else { 0.0 }).collect();
        (mass.iter().map(|a| a / dx).collect(), u)
    }
}

#[derive(Debug, Clone, Copy)]
struct Event {
    t: f64,
    left: usize,
    right: usize,
    stamp: (u64, u64),
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    // earliest time first, ties broken by position in the chain
    fn cmp(&self, other: &Self) -> Ordering {
        other.t.total_cmp(&self.t).then_with(|| other.left.cmp(&self.left))
    }
}

struct Chain {
    x_ref: Vec<f64>,
    t_ref: Vec<f64>,
    v: Vec<f64>,
    m: Vec<f64>,
    alive: Vec<bool>,
    version: Vec<u64>,
    next: Vec<Option<usize>>,
    prev: Vec<Option<usize>>,
    /// First particle of the chain; on a periodic line the pair
    /// `(prev[head], head)` straddles the seam.
    head: usize,
    period: Option<f64>,
}

impl Chain {
    fn pos(&self, k: usize, t: f64) -> f64 {
        self.x_ref[k] + self.v[k] * (t - self.t_ref[k])
    }

    fn collision(&self, l: usize, r: usize) -> Option<Event> {
        if l == r || self.v[l] <= self.v[r] {
            return None;
        }
        let shift = if r == self.head { self.period.unwrap_or(0.0) } else { 0.0 };
        let num = (self.x_ref[r] - self.v[r] * self.t_ref[r] + shift) - (self.x_ref[l] - self.v[l] * self.t_ref[l]);
        let t = num / (self.v[l] - self.v[r]);
        Some(Event { t, left: l, right: r, stamp: (self.version[l], self.version[r]) })
    }

    fn valid(&self, e: &Event) -> bool {
        self.alive[e.left]
            && self.alive[e.right]
            && self.version[e.left] == e.stamp.0
            && self.version[e.right] == e.stamp.1
            && self.next[e.left] == Some(e.right)
    }

    fn merge(&mut self, e: &Event) {
        let (l, r) = (e.left, e.right);
        let x = self.pos(l, e.t);
        let m = self.m[l] + self.m[r];
        let v = (self.m[l] * self.v[l] + self.m[r] * self.v[r]) / m;
        self.x_ref[l] = x;
        self.t_ref[l] = e.t;
        self.v[l] = v;
        self.m[l] = m;
        self.version[l] += 1;
        self.alive[r] = false;
        let after = self.next[r];
        self.next[l] = after.filter(|&a| a != r);
        if let Some(a) = self.next[l] {
            self.prev[a] = Some(l);
        }
        if r == self.head {
            // the merged particle sits a full period beyond the old head
            if let (Some(a), Some(p)) = (self.next[l], self.period) {
                self.head = a;
                if a == l {
                    self.x_ref[l] -= p;
                }
            }
        }
    }

    fn snapshot(&self, t: f64, x_min: f64) -> StickyParticles {
        let mut items: Vec<(f64, f64, f64)> = (0..self.alive.len())
            .filter(|&k| self.alive[k])
            .map(|k| {
                let mut x = self.pos(k, t);
                if let Some(p) = self.period {
                    x = x_min + (x - x_min).rem_euclid(p);
                }
                (x, self.m[k], self.v[k])
            })
            .collect();
        items.sort_by(|a, b| a.0.total_cmp(&b.0));
        StickyParticles {
            x: items.iter().map(|i| i.0).collect(),
            m: items.iter().map(|i| i.1).collect(),
            v: items.iter().map(|i| i.2).collect(),
            t,
        }
    }
}

/// Evolve `p0` and return snapshots at each of `times` (nondecreasing, ≥ `p0.t`).
pub fn sticky_run(p0: &StickyParticles, domain: &LineGrid, times: &[f64]) -> Result<Vec<StickyParticles>> {
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < p0.t) {
        return Err(Error::Config("snapshot times must be nondecreasing and not before the initial time".into()));
    }
    let n = p0.len();
    let periodic = domain.boundary == XBoundary::Periodic;
    let mut chain = Chain {
        x_ref: p0.x.clone(),
        t_ref: vec![p0.t; n],
        v: p0.v.clone(),
        m: p0.m.clone(),
        alive: vec![true; n],
        version: vec![0; n],
        next: (0..n).map(|k| if k + 1 < n { Some(k + 1) } else if periodic && n > 1 { Some(0) } else { None }).collect(),
        prev: (0..n).map(|k| if k > 0 { Some(k - 1) } else if periodic && n > 1 { Some(n - 1) } else { None }).collect(),
        head: 0,
        period: periodic.then(|| domain.length()),
    };
    let mut heap = BinaryHeap::new();
    for l in 0..n {
        if let Some(r) = chain.next[l] {
            heap.extend(chain.collision(l, r));
        }
    }
    let mut out = Vec::with_capacity(times.len());
    for &ts in times {
        while let Some(e) = heap.peek().copied() {
            if e.t > ts {
                break;
            }
            heap.pop();
            if !chain.valid(&e) {
                continue;
            }
            chain.merge(&e);
            let l = e.left;
            if let Some(p) = chain.prev[l] {
                heap.extend(chain.collision(p, l));
            }
            if let Some(r) = chain.next[l] {
                heap.extend(chain.collision(l, r));
            }
        }
        out.push(chain.snapshot(ts, domain.x_min));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(boundary: XBoundary) -> LineGrid {
        LineGrid::new(-1.0, 3.0, 8, boundary).unwrap()
    }

    #[test]
    fn two_particles_merge_at_the_predicted_point() {
        let p = StickyParticles::new(vec![0.0, 1.0], vec![1.0, 1.0], vec![2.0, 0.0]).unwrap();
        let out = sticky_run(&p, &line(XBoundary::FreeFlow), &[0.49, 0.5, 1.0]).unwrap();
        assert_eq!(out[0].len(), 2);
        assert_eq!(out[1].len(), 1);
        assert!((out[1].x[0] - 1.0).abs() < 1e-14);
        assert_eq!(out[1].m[0], 2.0);
        assert_eq!(out[1].v[0], 1.0);
        assert!((out[2].x[0] - 1.5).abs() < 1e-14);
    }

    #[test]
    fn single_particle_translates() {
        let p = StickyParticles::new(vec![0.25], vec![3.0], vec![0.7]).unwrap();
        let out = sticky_run(&p, &line(XBoundary::FreeFlow), &[2.0]).unwrap();
        assert!((out[0].x[0] - 1.65).abs() < 1e-14);
    }

    #[test]
    fn smooth_data_follow_characteristics_before_crossing() {
        let g = LineGrid::new(0.0, 1.0, 64, XBoundary::Periodic).unwrap();
        let rho0 = Profile::Constant { value: 1.0 };
        let u0 = Profile::Sine { mean: 1.0, amplitude: 0.1, period: 1.0, phase: 0.0 };
        let p = StickyParticles::from_profiles(&rho0, &u0, &g, 2).unwrap();
        let tc = super::super::crossing_time(&u0, 0.0, 1.0);
        let t = 0.9 * tc;
        let out = sticky_run(&p, &g, &[t]).unwrap();
        assert_eq!(out[0].len(), p.len());
        let mut expected: Vec<f64> = p.x.iter().map(|&x| (x + t * u0.eval(x)).rem_euclid(1.0)).collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in out[0].x.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn merges_conserve_mass_momentum_and_order() {
        let x: Vec<f64> = (0..50).map(|k| k as f64 * 0.04).collect();
        let v: Vec<f64> = (0..50).map(|k| 1.0 + ((k * 37) % 11) as f64 * 0.1).collect();
        let m: Vec<f64> = (0..50).map(|k| 0.5 + (k % 3) as f64).collect();
        let p = StickyParticles::new(x, m.clone(), v.clone()).unwrap();
        let (m0, p0): (f64, f64) = (m.iter().sum(), m.iter().zip(&v).map(|(a, b)| a * b).sum());
        for boundary in [XBoundary::FreeFlow, XBoundary::Periodic] {
            let g = LineGrid::new(0.0, 2.0, 8, boundary).unwrap();
            let out = sticky_run(&p, &g, &[0.5, 1.0, 3.0]).unwrap();
            for s in &out {
                let m1: f64 = s.m.iter().sum();
                let p1: f64 = s.m.iter().zip(&s.v).map(|(a, b)| a * b).sum();
                assert!((m1 - m0).abs() < 1e-12 * m0);
                assert!((p1 - p0).abs() < 1e-12 * p0);
                assert!(s.v.iter().all(|&w| (1.0..=2.0).contains(&w)));
                assert!(s.x.windows(2).all(|w| w[1] >= w[0]));
            }
            assert!(out[2].len() < 50);
        }
    }
}
