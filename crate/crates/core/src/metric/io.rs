//! Line-based dendrogram text format.
//!
//! ```text
//! dendrogram 1
//! leaves <count> point <index>
//! leaf [mass]           one line per leaf, in node order
//! merge <child>... <height>
//! ```
//! Floats use the shortest representation that parses back to the same
//! value, so a write/read cycle is bit-exact.

use super::{Dendrogram, Merge};
use crate::error::{Error, Result};

pub fn write_dendrogram(d: &Dendrogram) -> String {
    let mut s = format!("dendrogram 1\nleaves {} point {}\n", d.leaf_count, d.point);
    for i in 0..d.leaf_count {
        match &d.masses {
            Some(m) => s.push_str(&format!("leaf {}\n", m[i])),
            None => s.push_str("leaf\n"),
        }
    }
    for m in &d.merges {
        s.push_str("merge");
        for c in &m.children {
            s.push_str(&format!(" {c}"));
        }
        s.push_str(&format!(" {}\n", m.height));
    }
    s
}

pub fn read_dendrogram(text: &str) -> Result<Dendrogram> {
    let err = |ln: usize, what: &str| Error::Parse(format!("line {}: {what}", ln + 1));
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, l)) if l.trim() == "dendrogram 1" => {}
        _ => return Err(Error::Parse("missing 'dendrogram 1' header".into())),
    }
    let (ln, head) = lines
        .next()
        .ok_or_else(|| Error::Parse("missing leaves line".into()))?;
    let f: Vec<&str> = head.split_whitespace().collect();
    if f.len() != 4 || f[0] != "leaves" || f[2] != "point" {
        return Err(err(ln, "expected 'leaves <count> point <index>'"));
    }
    let count: usize = f[1].parse().map_err(|_| err(ln, "leaf count"))?;
    let point: usize = f[3].parse().map_err(|_| err(ln, "point index"))?;
    let mut masses = Vec::new();
    let mut any_mass = None;
    for _ in 0..count {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| Error::Parse("too few leaf lines".into()))?;
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.first() != Some(&"leaf") || f.len() > 2 {
            return Err(err(ln, "expected 'leaf [mass]'"));
        }
        let has = f.len() == 2;
        if *any_mass.get_or_insert(has) != has {
            return Err(err(ln, "masses must be given for all leaves or none"));
        }
        if has {
            masses.push(f[1].parse::<f64>().map_err(|_| err(ln, "mass"))?);
        }
    }
    let mut merges = Vec::new();
    for (ln, l) in lines {
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.first() != Some(&"merge") || f.len() < 4 {
            return Err(err(ln, "expected 'merge <child> <child>... <height>'"));
        }
        let height: f64 = f[f.len() - 1].parse().map_err(|_| err(ln, "height"))?;
        let children = f[1..f.len() - 1]
            .iter()
            .map(|c| c.parse::<usize>().map_err(|_| err(ln, "child id")))
            .collect::<Result<_>>()?;
        merges.push(Merge { children, height });
    }
    let masses = if any_mass == Some(true) {
        Some(masses)
    } else {
        None
    };
    Dendrogram::new(count, point, masses, merges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let gaps = [0.1 + 0.2, 1.0 / 3.0, 1e-7, 0.7];
        let d =
            Dendrogram::from_gaps(&gaps, 2, Some(vec![0.1, 0.2, 1.0 / 7.0, 5e-9, 0.3])).unwrap();
        let back = read_dendrogram(&write_dendrogram(&d)).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_dendrogram("nope").is_err());
        assert!(
            read_dendrogram("dendrogram 1\nleaves 2 point 0\nleaf\nleaf\nmerge 0 1 x\n").is_err()
        );
        assert!(
            read_dendrogram("dendrogram 1\nleaves 2 point 0\nleaf 1\nleaf\nmerge 0 1 1\n").is_err()
        );
    }
}
