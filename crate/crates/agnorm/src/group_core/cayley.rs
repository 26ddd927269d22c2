//! Cayley table text format: the order `n` on the first line, then `n` rows of
//! `n` space-separated indices, then an optional line of `n` labels.

use super::group::Group;
use crate::{Error, Result};

pub fn parse_table(text: &str, name: &str) -> Result<Group> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let n: usize = lines
        .next()
        .ok_or_else(|| Error::Spec(format!("{name}: empty table file")))?
        .parse()
        .map_err(|_| Error::Spec(format!("{name}: first line must be the order")))?;
    if n == 0 || n > crate::MAX_DENSE_ORDER {
        return Err(Error::Limit {
            what: "group order",
            got: n,
            limit: crate::MAX_DENSE_ORDER,
        });
    }
    let mut rows = Vec::with_capacity(n);
    for r in 0..n {
        let line = lines
            .next()
            .ok_or_else(|| Error::Spec(format!("{name}: expected {n} rows, found {r}")))?;
        let row: std::result::Result<Vec<usize>, _> = line.split_whitespace().map(str::parse).collect();
        rows.push(row.map_err(|_| Error::Spec(format!("{name}: row {r} is not a list of indices")))?);
    }
    let labels = match lines.next() {
        None => None,
        Some(l) => {
            let labels: Vec<String> = l.split_whitespace().map(String::from).collect();
            if labels.len() != n {
                return Err(Error::Spec(format!("{name}: label line has {} entries", labels.len())));
            }
            Some(labels)
        }
    };
    if lines.next().is_some() {
        return Err(Error::Spec(format!("{name}: trailing content after label line")));
    }
    Group::from_table(name, rows, labels)
}

pub fn format_table(g: &Group) -> String {
    let n = g.order();
    let mut out = format!("{n}\n");
    for a in 0..n {
        let row: Vec<String> = (0..n).map(|b| g.mul(a, b).to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    if let Some(labels) = g.labels() {
        if labels.iter().all(|l| !l.contains(char::is_whitespace)) {
            out.push_str(&labels.join(" "));
            out.push('\n');
        }
    }
    out
}
