//! Named group families and the spec-string parser.
//!
//! Spec grammar: `family:n` with family one of `cyclic`, `dihedral` (order
//! `n`, so `dihedral:8` is the symmetry group of the square), `symmetric`
//! (degree `n`), `quaternion` (dicyclic of order `n`, `4 | n`); factors joined
//! by `*` form a direct product; `@path` loads a Cayley table file.

use std::collections::HashMap;

use super::cayley;
use super::group::Group;
use crate::{Error, Result, MAX_DENSE_ORDER};

/// Parses a spec string and builds the group, capped at [`MAX_DENSE_ORDER`].
pub fn build_group(spec: &str) -> Result<Group> {
    build_group_capped(spec, MAX_DENSE_ORDER)
}

/// As [`build_group`] with an explicit order cap (clamped to the hard cap).
pub fn build_group_capped(spec: &str, cap: usize) -> Result<Group> {
    let cap = cap.min(MAX_DENSE_ORDER);
    let spec = spec.trim();
    if let Some(path) = spec.strip_prefix('@') {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
        let g = cayley::parse_table(&text, path)?;
        return check_cap(g, cap);
    }
    let factors: Vec<&str> = spec.split('*').map(str::trim).collect();
    if factors.iter().any(|f| f.is_empty()) {
        return Err(Error::Spec(spec.to_string()));
    }
    // Check the cap before materializing any table.
    let mut total = 1usize;
    for f in &factors {
        total = total.saturating_mul(factor_order(f)?);
    }
    if total > cap {
        return Err(Error::Limit {
            what: "group order",
            got: total,
            limit: cap,
        });
    }
    let mut g = family(factors[0])?;
    for f in &factors[1..] {
        g = direct_product(&g, &family(f)?)?;
    }
    Ok(g)
}

fn check_cap(g: Group, cap: usize) -> Result<Group> {
    if g.order() > cap {
        Err(Error::Limit {
            what: "group order",
            got: g.order(),
            limit: cap,
        })
    } else {
        Ok(g)
    }
}

fn split_family(spec: &str) -> Result<(&str, usize)> {
    let (fam, arg) = spec.split_once(':').ok_or_else(|| Error::Spec(spec.to_string()))?;
    let n: usize = arg.trim().parse().map_err(|_| Error::Spec(spec.to_string()))?;
    Ok((fam.trim(), n))
}

fn factor_order(spec: &str) -> Result<usize> {
    let (fam, n) = split_family(spec)?;
    match fam {
        "cyclic" if n >= 1 => Ok(n),
        "dihedral" if n >= 2 && n % 2 == 0 => Ok(n),
        "quaternion" if n >= 4 && n % 4 == 0 => Ok(n),
        "symmetric" if (1..=7).contains(&n) => Ok((1..=n).product()),
        _ => Err(Error::Spec(spec.to_string())),
    }
}

fn family(spec: &str) -> Result<Group> {
    factor_order(spec)?;
    let (fam, n) = split_family(spec)?;
    match fam {
        "cyclic" => cyclic(n),
        "dihedral" => dihedral(n),
        "quaternion" => dicyclic(n),
        "symmetric" => symmetric(n),
        _ => Err(Error::Spec(spec.to_string())),
    }
}

pub fn cyclic(n: usize) -> Result<Group> {
    let mul = (0..n).flat_map(|a| (0..n).map(move |b| ((a + b) % n) as u32)).collect();
    let labels = (0..n).map(|k| k.to_string()).collect();
    Group::from_flat(format!("cyclic:{n}"), n, mul, Some(labels))
}

/// Dihedral group of order `n = 2m`; element `k + m·j` is `r^k s^j`.
pub fn dihedral(n: usize) -> Result<Group> {
    let m = n / 2;
    let decode = |x: usize| (x % m, x / m);
    let mut mul = Vec::with_capacity(n * n);
    for a in 0..n {
        let (p, i) = decode(a);
        for b in 0..n {
            let (q, j) = decode(b);
            // r^p s^i · r^q s^j = r^{p ± q} s^{i+j}
            let k = if i == 0 { (p + q) % m } else { (p + m - q) % m };
            mul.push((k + m * ((i + j) % 2)) as u32);
        }
    }
    let labels = (0..n)
        .map(|x| {
            let (k, j) = decode(x);
            match (k, j) {
                (0, 0) => "e".to_string(),
                (k, 0) => format!("r^{k}"),
                (0, _) => "s".to_string(),
                (k, _) => format!("r^{k}s"),
            }
        })
        .collect();
    Group::from_flat(format!("dihedral:{n}"), n, mul, Some(labels))
}

/// Dicyclic group of order `n = 4m`: `⟨a, x | a^{2m}, x² = a^m, x a x⁻¹ = a⁻¹⟩`;
/// element `k + 2m·j` is `a^k x^j`. Order 8 is the quaternion group.
pub fn dicyclic(n: usize) -> Result<Group> {
    let t = n / 2;
    let m = n / 4;
    let decode = |x: usize| (x % t, x / t);
    let mut mul = Vec::with_capacity(n * n);
    for a in 0..n {
        let (p, i) = decode(a);
        for b in 0..n {
            let (q, j) = decode(b);
            let (k, l) = match (i, j) {
                (0, j) => ((p + q) % t, j),
                (_, 0) => ((p + t - q) % t, 1),
                (_, _) => ((p + t - q + m) % t, 0),
            };
            mul.push((k + t * l) as u32);
        }
    }
    let labels = if n == 8 {
        ["1", "i", "-1", "-i", "j", "k", "-j", "-k"].iter().map(|s| s.to_string()).collect()
    } else {
        (0..n)
            .map(|x| {
                let (k, j) = decode(x);
                match (k, j) {
                    (0, 0) => "e".to_string(),
                    (k, 0) => format!("a^{k}"),
                    (0, _) => "x".to_string(),
                    (k, _) => format!("a^{k}x"),
                }
            })
            .collect()
    };
    Group::from_flat(format!("quaternion:{n}"), n, mul, Some(labels))
}

/// Symmetric group on `{1..n}`: even permutations first, then odd ones,
/// each block in lexicographic order of one-line notation. Index 0 is the
/// identity and `{0, …, n!/2 − 1}` is the alternating group.
/// `(στ)(i) = σ(τ(i))`.
pub fn symmetric(n: usize) -> Result<Group> {
    let mut perms = permutations(n);
    perms.sort_by_key(|p| is_odd(p));
    let index: HashMap<&[usize], usize> = perms.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
    let order = perms.len();
    let mut mul = Vec::with_capacity(order * order);
    let mut buf = vec![0usize; n];
    for s in &perms {
        for t in &perms {
            for i in 0..n {
                buf[i] = s[t[i]];
            }
            mul.push(index[buf.as_slice()] as u32);
        }
    }
    let labels = perms
        .iter()
        .map(|p| format!("[{}]", p.iter().map(|v| (v + 1).to_string()).collect::<Vec<_>>().join(",")))
        .collect();
    Group::from_flat(format!("symmetric:{n}"), order, mul, Some(labels))
}

fn is_odd(p: &[usize]) -> bool {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            inversions += (p[i] > p[j]) as usize;
        }
    }
    inversions % 2 == 1
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(n, cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    rec(n, &mut cur, &mut used, &mut out);
    out
}

/// `G × H` with element `(g, h)` at index `g·|H| + h`.
pub fn direct_product(g: &Group, h: &Group) -> Result<Group> {
    let (n1, n2) = (g.order(), h.order());
    let n = n1 * n2;
    if n > MAX_DENSE_ORDER {
        return Err(Error::Limit {
            what: "group order",
            got: n,
            limit: MAX_DENSE_ORDER,
        });
    }
    let mut mul = Vec::with_capacity(n * n);
    for a in 0..n {
        let (a1, a2) = (a / n2, a % n2);
        for b in 0..n {
            let (b1, b2) = (b / n2, b % n2);
            mul.push((g.mul(a1, b1) * n2 + h.mul(a2, b2)) as u32);
        }
    }
    let labels = (0..n).map(|x| format!("({},{})", g.label(x / n2), h.label(x % n2))).collect();
    Group::from_flat(format!("{}*{}", g.name(), h.name()), n, mul, Some(labels))
}

/// Specs of the catalog groups of order at most `max_order`: every cyclic,
/// dihedral, dicyclic and symmetric group in range plus a fixed list of
/// direct products. Several entries may be isomorphic; that is intended.
pub fn catalog(max_order: usize) -> Vec<String> {
    let mut out = Vec::new();
    for n in 1..=max_order {
        out.push(format!("cyclic:{n}"));
    }
    for n in (4..=max_order).step_by(2) {
        out.push(format!("dihedral:{n}"));
    }
    for n in (8..=max_order).step_by(4) {
        out.push(format!("quaternion:{n}"));
    }
    for k in 3..=7usize {
        if (1..=k).product::<usize>() <= max_order {
            out.push(format!("symmetric:{k}"));
        }
    }
    let products = [
        ("cyclic:2*cyclic:2", 4),
        ("cyclic:2*cyclic:4", 8),
        ("cyclic:2*cyclic:2*cyclic:2", 8),
        ("cyclic:3*cyclic:3", 9),
        ("cyclic:2*cyclic:6", 12),
        ("cyclic:2*symmetric:3", 12),
        ("cyclic:4*cyclic:4", 16),
        ("cyclic:2*cyclic:8", 16),
        ("cyclic:2*cyclic:2*cyclic:4", 16),
        ("cyclic:2*cyclic:2*cyclic:2*cyclic:2", 16),
        ("cyclic:2*dihedral:8", 16),
        ("cyclic:2*quaternion:8", 16),
        ("cyclic:3*symmetric:3", 18),
        ("cyclic:3*cyclic:6", 18),
        ("cyclic:2*cyclic:10", 20),
        ("cyclic:2*cyclic:2*symmetric:3", 24),
        ("cyclic:3*dihedral:8", 24),
        ("cyclic:3*quaternion:8", 24),
        ("cyclic:2*dihedral:12", 24),
        ("cyclic:2*cyclic:12", 24),
        ("cyclic:4*symmetric:3", 24),
    ];
    for (s, n) in products {
        if n <= max_order {
            out.push(s.to_string());
        }
    }
    out
}
