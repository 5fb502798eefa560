//! Exhaustive enumeration of toric log del Pezzo fans in a box, `GL(2,Z)`
//! normal forms and seeded random complete fans.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::intersection::turn;
use super::{Fan2, Ray};
use crate::lattice::cross;

/// Primitive vectors of `[-b, b]^2` in lexicographic order.
pub(crate) fn primitive_box(b: i64) -> Vec<Ray> {
    let mut out = Vec::new();
    for x in -b..=b {
        for y in -b..=b {
            if x.gcd(&y) == 1 {
                out.push([x, y]);
            }
        }
    }
    out
}

/// Angle of `v` measured counterclockwise from `f`, as a sort key.
fn relative_angle_cmp(f: Ray, a: Ray, b: Ray) -> Ordering {
    let half = |v: Ray| u8::from(cross(f, v) <= 0);
    half(a).cmp(&half(b)).then_with(|| 0.cmp(&cross(a, b)))
}

/// All ample fans whose canonical form starts with `first`.
fn fans_starting_at(first: Ray, points: &[Ray], out: &mut Vec<Fan2>) {
    let mut cand: Vec<Ray> = points.iter().copied().filter(|&p| p > first).collect();
    cand.sort_by(|&a, &b| relative_angle_cmp(first, a, b));
    let mut path = vec![first];
    extend(&mut path, &cand, 0, out);
}

fn extend(path: &mut Vec<Ray>, cand: &[Ray], from: usize, out: &mut Vec<Fan2>) {
    let first = path[0];
    let last = *path.last().expect("path is nonempty");
    for (k, &c) in cand.iter().enumerate().skip(from) {
        // gaps of at least pi can only grow further along the angular order
        if cross(last, c) <= 0 {
            break;
        }
        if path.len() >= 2 {
            if turn(path[path.len() - 2], last, c) <= 0 {
                continue;
            }
            // every later vertex lies strictly left of the first edge
            if turn(first, path[1], c) <= 0 {
                continue;
            }
        }
        path.push(c);
        if path.len() >= 3
            && cross(c, first) > 0
            && turn(last, c, first) > 0
            && turn(c, first, path[1]) > 0
        {
            out.push(Fan2::from_ccw_unchecked(path.clone()));
        }
        extend(path, cand, k + 1, out);
        path.pop();
    }
}

/// Every complete fan with rays primitive in `[-b, b]^2` whose rays are the
/// vertices of a convex polygon (equivalently, `-K` ample), each in canonical
/// form, sorted.
pub fn ldp_enumerate(b: i64) -> Vec<Fan2> {
    ldp_enumerate_with(b, 1, false)
}

/// As [`ldp_enumerate`], split by first ray across `workers` threads. With
/// `dedupe`, only the first fan of each `GL(2,Z)` class is kept.
pub fn ldp_enumerate_with(b: i64, workers: usize, dedupe: bool) -> Vec<Fan2> {
    assert!(b >= 1, "coordinate bound must be positive");
    let points = primitive_box(b);
    let work = |first: &Ray| {
        let mut out = Vec::new();
        fans_starting_at(*first, &points, &mut out);
        out
    };
    let mut fans: Vec<Fan2> = if workers <= 1 {
        points.iter().flat_map(work).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("thread pool");
        pool.install(|| points.par_iter().flat_map_iter(work).collect())
    };
    fans.sort();
    if dedupe {
        let mut seen = BTreeSet::new();
        fans.retain(|f| seen.insert(gl2_normal_form(f)));
    }
    fans
}

/// Complete invariant of a fan under `GL(2,Z)`: the least ray sequence over
/// all choices of starting ray and orientation after moving the starting
/// cone to `Cone((1,0), (x,r))` with `0 <= x < r`.
pub fn gl2_normal_form(f: &Fan2) -> Vec<Ray> {
    let mirrored: Vec<Ray> = f.rays().iter().rev().map(|&[x, y]| [y, x]).collect();
    let mut best: Option<Vec<Ray>> = None;
    for seq in [f.rays().to_vec(), mirrored] {
        let n = seq.len();
        for s in 0..n {
            let u = seq[s];
            let v = seq[(s + 1) % n];
            // columns u, w with det 1; its inverse sends u to (1,0)
            let e = (u[0] as i128).extended_gcd(&(u[1] as i128));
            let (mut a, mut b) = (e.x, e.y);
            if e.gcd < 0 {
                (a, b) = (-a, -b);
            }
            // a*u0 + b*u1 = 1, so w = (-b, a)
            let map = |p: Ray| -> [i128; 2] {
                let (x, y) = (p[0] as i128, p[1] as i128);
                [a * x + b * y, -(u[1] as i128) * x + (u[0] as i128) * y]
            };
            let mv = map(v);
            let r = mv[1];
            let k = Integer::div_floor(&mv[0], &r);
            let key: Vec<Ray> = (0..n)
                .map(|t| {
                    let p = map(seq[(s + t) % n]);
                    [(p[0] - k * p[1]) as i64, p[1] as i64]
                })
                .collect();
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        }
    }
    best.expect("fan has rays")
}

/// Deterministic random complete fan with between 3 and `max_rays` primitive
/// rays in `[-b, b]^2`.
pub fn random_complete_fan(seed: u64, max_rays: usize, b: i64) -> Fan2 {
    assert!(max_rays >= 3, "a complete fan needs at least 3 rays");
    assert!(b >= 1, "coordinate bound must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let k = rng.gen_range(3..=max_rays);
        let mut rays = Vec::with_capacity(k);
        while rays.len() < k {
            let p = [rng.gen_range(-b..=b), rng.gen_range(-b..=b)];
            if p[0].gcd(&p[1]) == 1 {
                rays.push(p);
            }
        }
        rays.sort();
        rays.dedup();
        if let Ok(f) = Fan2::from_primitive(rays) {
            return f;
        }
    }
}
