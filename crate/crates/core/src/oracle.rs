//! Brute-force Vietoris-Rips persistence over Z/2 for at most 12 points.
//!
//! Every simplex up to the requested dimension is enumerated as a bitmask,
//! sorted by (diameter, dimension, vertex order), and the boundary matrix
//! is reduced column by column.

use std::cmp::Ordering;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::metric::DistanceMatrix;

pub const MAX_POINTS: usize = 12;

/// A finite multiset of (birth, death) pairs. Deaths may be `+∞`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagram {
    pub degree: usize,
    pub points: Vec<(f64, f64)>,
}

impl Diagram {
    pub fn new(degree: usize, mut points: Vec<(f64, f64)>) -> Self {
        points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        Diagram { degree, points }
    }

    pub fn empty(degree: usize) -> Self {
        Diagram { degree, points: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Diagram::new(self.degree, self.points.iter().map(|&(b, d)| (b * c, d * c)).collect())
    }

    /// `[{"b": x, "d": y}, …]` with the string `"inf"` for an infinite death.
    pub fn to_json(&self) -> Value {
        let num = |x: f64| if x.is_infinite() { json!("inf") } else { json!(x) };
        Value::Array(self.points.iter().map(|&(b, d)| json!({"b": num(b), "d": num(d)})).collect())
    }

    pub fn from_json(degree: usize, v: &Value) -> Result<Self> {
        let num = |x: &Value| match x {
            Value::String(s) if s == "inf" => Ok(f64::INFINITY),
            _ => x.as_f64().ok_or_else(|| Error::Parse(format!("expected a number, got {x}"))),
        };
        let arr = v.as_array().ok_or_else(|| Error::Parse("diagram must be a JSON array".into()))?;
        let points = arr.iter().map(|p| Ok((num(&p["b"])?, num(&p["d"])?))).collect::<Result<Vec<_>>>()?;
        Ok(Diagram::new(degree, points))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Simplex {
    /// Bit `i` set when vertex `i` belongs to the simplex.
    pub vertices: u16,
    pub value: f64,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.vertices.count_ones() as usize - 1
    }

    pub fn vertex_list(&self) -> Vec<usize> {
        (0..16).filter(|i| self.vertices >> i & 1 == 1).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Filtration {
    pub max_dim: usize,
    pub simplices: Vec<Simplex>,
}

fn lex_cmp(a: u16, b: u16) -> Ordering {
    // Sorted vertex tuples compared lexicographically: the lowest differing
    // vertex decides, and a tuple that is a prefix of another comes first.
    if a == b {
        return Ordering::Equal;
    }
    let diff = a ^ b;
    let low = diff.trailing_zeros();
    let below = (1u16 << low) - 1;
    let (ra, rb) = (a & !below, b & !below);
    if ra >> low & 1 == 1 {
        // `a` has the smaller vertex here unless `b` has already ended
        if rb == 0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    } else if ra == 0 {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

fn filtration_order(a: &Simplex, b: &Simplex) -> Ordering {
    a.value.total_cmp(&b.value).then(a.dim().cmp(&b.dim())).then_with(|| lex_cmp(a.vertices, b.vertices))
}

impl Filtration {
    /// Sorts the given simplices into filtration order without checking
    /// that faces precede cofaces; `reduce` does that.
    pub fn from_simplices(max_dim: usize, mut simplices: Vec<Simplex>) -> Self {
        simplices.sort_by(filtration_order);
        Filtration { max_dim, simplices }
    }
}

/// Every simplex of dimension at most `max_dim`, valued by its diameter.
pub fn build_vr_filtration(m: &DistanceMatrix, max_dim: usize) -> Result<Filtration> {
    let n = m.size();
    if n > MAX_POINTS {
        return Err(Error::TooLarge(format!("{n} points exceed the oracle limit of {MAX_POINTS}")));
    }
    if max_dim + 1 > n {
        return Err(Error::TooLarge(format!("dimension {max_dim} needs more than {n} points")));
    }
    let full = 1u32 << n;
    let mut value = vec![0.0f64; full as usize];
    let mut simplices = Vec::new();
    for mask in 1..full {
        let size = mask.count_ones() as usize;
        if size > max_dim + 1 {
            continue;
        }
        if size > 1 {
            // diameter = max(diameter without top vertex, distances to it)
            let top = 31 - mask.leading_zeros();
            let rest = mask & !(1 << top);
            let mut v = value[rest as usize];
            let mut r = rest;
            while r != 0 {
                let i = r.trailing_zeros();
                v = v.max(m.get(i as usize, top as usize));
                r &= r - 1;
            }
            value[mask as usize] = v;
        }
        simplices.push(Simplex { vertices: mask as u16, value: value[mask as usize] });
    }
    Ok(Filtration::from_simplices(max_dim, simplices))
}

fn add_columns(target: &mut Vec<usize>, other: &[usize]) {
    let mut out = Vec::with_capacity(target.len() + other.len());
    let (mut i, mut j) = (0, 0);
    while i < target.len() && j < other.len() {
        match target[i].cmp(&other[j]) {
            Ordering::Less => {
                out.push(target[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(other[j]);
                j += 1;
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&target[i..]);
    out.extend_from_slice(&other[j..]);
    *target = out;
}

/// Reduced diagrams for degrees `0..max_dim`, zero-persistence pairs removed.
pub fn reduce(f: &Filtration) -> Result<Vec<Diagram>> {
    let mut position = std::collections::HashMap::with_capacity(f.simplices.len());
    for (i, s) in f.simplices.iter().enumerate() {
        position.insert(s.vertices, i);
    }
    let mut columns: Vec<Vec<usize>> = Vec::with_capacity(f.simplices.len());
    for (j, s) in f.simplices.iter().enumerate() {
        let mut col = Vec::new();
        if s.dim() > 0 {
            let mut r = s.vertices;
            while r != 0 {
                let bit = r & r.wrapping_neg();
                let face = position.get(&(s.vertices & !bit)).copied();
                match face {
                    Some(p) if p < j => col.push(p),
                    _ => return Err(Error::NonMonotoneFiltration(j)),
                }
                r &= r - 1;
            }
            col.sort_unstable();
        }
        columns.push(col);
    }

    let mut pivot_owner: Vec<Option<usize>> = vec![None; columns.len()];
    let mut paired = vec![false; columns.len()];
    let mut diagrams: Vec<Vec<(f64, f64)>> = vec![Vec::new(); f.max_dim];
    for j in 0..columns.len() {
        let mut col = std::mem::take(&mut columns[j]);
        while let Some(&low) = col.last() {
            match pivot_owner[low] {
                Some(other) => add_columns(&mut col, &columns[other]),
                None => break,
            }
        }
        if let Some(&low) = col.last() {
            pivot_owner[low] = Some(j);
            paired[low] = true;
            paired[j] = true;
            let birth = f.simplices[low].value;
            let death = f.simplices[j].value;
            let degree = f.simplices[low].dim();
            if degree < f.max_dim && birth < death {
                diagrams[degree].push((birth, death));
            }
        }
        columns[j] = col;
    }
    let mut dropped_essential_component = false;
    for (j, s) in f.simplices.iter().enumerate() {
        if paired[j] || !columns[j].is_empty() {
            continue;
        }
        let degree = s.dim();
        if degree >= f.max_dim {
            continue;
        }
        if degree == 0 && !dropped_essential_component {
            dropped_essential_component = true;
            continue;
        }
        diagrams[degree].push((s.value, f64::INFINITY));
    }
    Ok(diagrams.into_iter().enumerate().map(|(k, p)| Diagram::new(k, p)).collect())
}

/// Degree-k reduced VR diagram of a space with at most 12 points.
pub fn vr_diagram(m: &DistanceMatrix, k: usize) -> Result<Diagram> {
    if m.size() > MAX_POINTS {
        return Err(Error::TooLarge(format!("{} points exceed the oracle limit of {MAX_POINTS}", m.size())));
    }
    if crate::principal::vanishes_below_principal(m.size(), k) {
        return Ok(Diagram::empty(k));
    }
    let mut diagrams = reduce(&build_vr_filtration(m, k + 1)?)?;
    Ok(diagrams.swap_remove(k))
}
