use crate::error::{domain, Error, Result};
use crate::metric::{Dendrogram, Merge};
use crate::path::JumpPath;

/// An ordered list of timed mergers over labels `1..=n`.
///
/// Node ids: label `ℓ` is node `ℓ-1`; the block created by event `e` is
/// node `n + e`. Events are stored flat.
#[derive(Debug, Clone)]
pub struct CoalescentHistory {
    pub n: u32,
    /// Time up to which the history is known (horizon, or absorption time).
    pub final_time: f64,
    /// True when the history ran until a single block remained.
    pub absorbed: bool,
    times: Vec<f64>,
    offsets: Vec<u32>,
    children: Vec<u32>,
    parent: Vec<u32>,
    size: Vec<u32>,
    /// Block count after each event.
    blocks_after: Vec<u32>,
}

#[derive(Debug, Clone, Copy)]
pub struct EventRef<'a> {
    pub index: usize,
    pub time: f64,
    pub children: &'a [u32],
    pub new_id: u32,
}

/// `Z_ε` together with whether `ε` reached past absorption.
#[derive(Debug, Clone)]
pub struct ZPath {
    pub path: JumpPath,
    pub epsilon: f64,
    pub whole_space: bool,
}

const NO_PARENT: u32 = u32::MAX;

impl CoalescentHistory {
    pub(crate) fn from_parts(
        n: u32,
        final_time: f64,
        absorbed: bool,
        times: Vec<f64>,
        offsets: Vec<u32>,
        children: Vec<u32>,
    ) -> Self {
        let events = times.len();
        let nodes = n as usize + events;
        let mut parent = vec![NO_PARENT; nodes];
        let mut size = vec![1u32; nodes];
        let mut blocks_after = Vec::with_capacity(events);
        let mut blocks = n;
        for e in 0..events {
            let id = n as usize + e;
            let cs = &children[offsets[e] as usize..offsets[e + 1] as usize];
            let mut s = 0;
            for &c in cs {
                parent[c as usize] = id as u32;
                s += size[c as usize];
            }
            size[id] = s;
            blocks -= cs.len() as u32 - 1;
            blocks_after.push(blocks);
        }
        CoalescentHistory {
            n,
            final_time,
            absorbed,
            times,
            offsets,
            children,
            parent,
            size,
            blocks_after,
        }
    }

    /// Rebuilds a history from explicit events, validating the forest.
    pub fn from_events(
        n: u32,
        final_time: f64,
        absorbed: bool,
        events: &[(f64, Vec<u32>)],
    ) -> Result<Self> {
        let mut times = Vec::new();
        let mut offsets = vec![0u32];
        let mut children = Vec::new();
        let mut merged = vec![false; n as usize + events.len()];
        let mut alive = n as usize;
        for (e, (t, cs)) in events.iter().enumerate() {
            if times.last().is_some_and(|&p: &f64| *t <= p) || !(*t > 0.0) {
                return domain(format!(
                    "event {e}: times must be positive and strictly increasing"
                ));
            }
            if cs.len() < 2 {
                return domain(format!("event {e}: merges fewer than two blocks"));
            }
            for &c in cs {
                let c = c as usize;
                if c >= n as usize + e || merged[c] {
                    return domain(format!("event {e}: block {c} unavailable"));
                }
                merged[c] = true;
            }
            alive -= cs.len() - 1;
            times.push(*t);
            children.extend_from_slice(cs);
            offsets.push(children.len() as u32);
        }
        if absorbed && alive != 1 {
            return domain("absorbed history must end with one block");
        }
        if times.last().is_some_and(|&t| t > final_time) {
            return domain("final time precedes the last event");
        }
        Ok(Self::from_parts(
            n, final_time, absorbed, times, offsets, children,
        ))
    }

    pub fn event_count(&self) -> usize {
        self.times.len()
    }

    pub fn event(&self, e: usize) -> EventRef<'_> {
        EventRef {
            index: e,
            time: self.times[e],
            children: &self.children[self.offsets[e] as usize..self.offsets[e + 1] as usize],
            new_id: self.n + e as u32,
        }
    }

    pub fn events(&self) -> impl Iterator<Item = EventRef<'_>> {
        (0..self.event_count()).map(|e| self.event(e))
    }

    pub fn event_times(&self) -> &[f64] {
        &self.times
    }

    fn node_time(&self, node: u32) -> f64 {
        if node < self.n {
            0.0
        } else {
            self.times[(node - self.n) as usize]
        }
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(t > 0.0) {
            return domain(format!("time must be positive, got {t}"));
        }
        if t > self.final_time && !self.absorbed {
            return domain(format!(
                "time {t} is past the simulated horizon {}",
                self.final_time
            ));
        }
        Ok(())
    }

    /// `N(t)`, the number of blocks at time `t`.
    pub fn block_count(&self, t: f64) -> Result<u32> {
        self.check_time(t)?;
        let m = self.times.partition_point(|&s| s <= t);
        Ok(if m == 0 {
            self.n
        } else {
            self.blocks_after[m - 1]
        })
    }

    /// Node of the block containing `label` at time `t`.
    pub fn block_of(&self, label: u32, t: f64) -> Result<u32> {
        if label == 0 || label > self.n {
            return domain(format!("label {label} not in 1..={}", self.n));
        }
        self.check_time(t)?;
        let mut x = label - 1;
        loop {
            let p = self.parent[x as usize];
            if p == NO_PARENT || self.node_time(p) > t {
                return Ok(x);
            }
            x = p;
        }
    }

    /// `|block of 1 at t| / n`.
    pub fn frequency_of_one(&self, t: f64) -> Result<f64> {
        let b = self.block_of(1, t)?;
        Ok(self.size[b as usize] as f64 / self.n as f64)
    }

    pub fn block_size(&self, node: u32) -> u32 {
        self.size[node as usize]
    }

    fn node_children(&self, node: u32) -> &[u32] {
        if node < self.n {
            &[]
        } else {
            let e = (node - self.n) as usize;
            &self.children[self.offsets[e] as usize..self.offsets[e + 1] as usize]
        }
    }

    /// `Z_ε(r)`: number of blocks at time `(1-r)ε` composing the block of
    /// label 1 at time `ε`, as a right-continuous path on `[0,1)`.
    pub fn extract_z(&self, epsilon: f64) -> Result<ZPath> {
        let top = self.block_of(1, epsilon)?;
        let whole_space = self.absorbed && epsilon >= self.final_time;
        let mut jumps: Vec<(f64, u32)> = Vec::new();
        let mut stack = vec![top];
        while let Some(x) = stack.pop() {
            let cs = self.node_children(x);
            if !cs.is_empty() {
                jumps.push((1.0 - self.node_time(x) / epsilon, cs.len() as u32 - 1));
                stack.extend_from_slice(cs);
            }
        }
        jumps.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut path = JumpPath::constant(0.0, 1.0);
        let mut z = 1.0;
        for (r, dk) in jumps {
            z += dk as f64;
            if path.times.last() == Some(&r) {
                *path.values.last_mut().expect("nonempty") = z;
            } else {
                path.push(r.max(0.0), z);
            }
        }
        Ok(ZPath {
            path,
            epsilon,
            whole_space,
        })
    }

    /// Closed ball `B(center, radius)` of the Evans metric, leaves being the
    /// labels of the ball, merge heights the merger times and leaf masses
    /// `1/n`. Pointed at `center`.
    pub fn evans_space(&self, center_label: u32, radius: f64) -> Result<Dendrogram> {
        if !(radius > 0.0) {
            return domain("radius must be positive");
        }
        let radius = if self.absorbed {
            radius.min(self.final_time)
        } else {
            radius
        };
        let top = self.block_of(center_label, radius)?;
        self.subtree_dendrogram(top, center_label - 1)
    }

    fn subtree_dendrogram(&self, top: u32, center: u32) -> Result<Dendrogram> {
        let mut leaves = Vec::new();
        let mut internal = Vec::new();
        let mut stack = vec![top];
        while let Some(x) = stack.pop() {
            if x < self.n {
                leaves.push(x);
            } else {
                internal.push(x);
                stack.extend_from_slice(self.node_children(x));
            }
        }
        leaves.sort_unstable();
        internal.sort_unstable();
        let map = |x: u32| -> usize {
            if x < self.n {
                leaves.binary_search(&x).expect("leaf in subtree")
            } else {
                leaves.len() + internal.binary_search(&x).expect("node in subtree")
            }
        };
        let merges = internal
            .iter()
            .map(|&x| Merge {
                children: self.node_children(x).iter().map(|&c| map(c)).collect(),
                height: self.node_time(x),
            })
            .collect();
        let point = leaves
            .binary_search(&center)
            .map_err(|_| Error::Domain("center not in ball".into()))?;
        let masses = vec![1.0 / self.n as f64; leaves.len()];
        Dendrogram::new(leaves.len(), point, Some(masses), merges)
    }

    /// CSV with columns `event_index,time,k,block_ids...`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("event_index,time,k,block_ids\n");
        for ev in self.events() {
            s.push_str(&format!("{},{},{}", ev.index, ev.time, ev.children.len()));
            for c in ev.children {
                s.push_str(&format!(",{c}"));
            }
            s.push('\n');
        }
        s
    }

    /// Inverse of [`to_csv`](Self::to_csv).
    pub fn from_csv(n: u32, final_time: f64, absorbed: bool, text: &str) -> Result<Self> {
        let mut events = Vec::new();
        for (ln, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |what: &str| Error::Parse(format!("line {}: {what}", ln + 1));
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() < 5 {
                return Err(bad("too few fields"));
            }
            let t: f64 = fields[1].parse().map_err(|_| bad("time"))?;
            let k: usize = fields[2].parse().map_err(|_| bad("k"))?;
            let ids: Vec<u32> = fields[3..]
                .iter()
                .map(|f| f.parse().map_err(|_| bad("block id")))
                .collect::<Result<_>>()?;
            if ids.len() != k {
                return Err(bad("k does not match the number of block ids"));
            }
            events.push((t, ids));
        }
        Self::from_events(n, final_time, absorbed, &events)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_label(t: f64) -> CoalescentHistory {
        CoalescentHistory::from_events(2, t, true, &[(t, vec![0, 1])]).unwrap()
    }

    #[test]
    fn counts_and_frequency() {
        let h = two_label(0.7);
        assert_eq!(h.block_count(0.5).unwrap(), 2);
        assert_eq!(h.frequency_of_one(0.5).unwrap(), 0.5);
        assert_eq!(h.block_count(5.0).unwrap(), 1);
        assert_eq!(h.frequency_of_one(5.0).unwrap(), 1.0);
        assert!(h.block_count(0.0).is_err());
    }

    #[test]
    fn z_single_jump() {
        let h = two_label(0.3);
        let z = h.extract_z(1.0).unwrap();
        assert!(z.whole_space);
        assert_eq!(z.path.times, vec![0.0, 0.7]);
        assert_eq!(z.path.values, vec![1.0, 2.0]);
        let early = h.extract_z(0.2).unwrap();
        assert_eq!(early.path.values, vec![1.0]);
    }

    #[test]
    fn evans_two_leaves() {
        let h = two_label(0.3);
        let d = h.evans_space(1, 1.0).unwrap();
        assert_eq!(d.leaf_count, 2);
        assert_eq!(d.distance(0, 1), 0.3);
        let small = h.evans_space(2, 0.1).unwrap();
        assert_eq!(small.leaf_count, 1);
    }

    #[test]
    fn rejects_invalid_forest() {
        assert!(CoalescentHistory::from_events(
            3,
            1.0,
            false,
            &[(0.1, vec![0, 1]), (0.2, vec![1, 2])]
        )
        .is_err());
        assert!(CoalescentHistory::from_events(
            3,
            1.0,
            false,
            &[(0.2, vec![0, 1]), (0.1, vec![3, 2])]
        )
        .is_err());
    }

    #[test]
    fn csv_round_trip() {
        let h = CoalescentHistory::from_events(
            4,
            1.0,
            true,
            &[(0.1, vec![0, 2]), (0.4, vec![1, 3, 4])],
        )
        .unwrap();
        let back = CoalescentHistory::from_csv(4, 1.0, true, &h.to_csv()).unwrap();
        assert_eq!(back.to_csv(), h.to_csv());
        assert_eq!(back.block_count(0.2).unwrap(), 3);
    }
}
