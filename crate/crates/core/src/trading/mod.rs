//! Equivariant cell inventories, cell trading and the staircase.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};


/// Cell counts keyed by `(dimension, isotropy label)`. Zero entries are never
/// stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CellInventory {
    counts: BTreeMap<(usize, String), u64>,
}

impl CellInventory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_cells<S: Into<String>>(cells: impl IntoIterator<Item = (usize, S, u64)>) -> Self {
        let mut inv = Self::new();
        for (d, label, c) in cells {
            inv.add(d, &label.into(), c);
        }
        inv
    }

    pub fn get(&self, d: usize, label: &str) -> u64 {
        self.counts.get(&(d, label.to_string())).copied().unwrap_or(0)
    }

    pub fn add(&mut self, d: usize, label: &str, c: u64) {
        if c > 0 {
            *self.counts.entry((d, label.to_string())).or_insert(0) += c;
        }
    }

    fn remove(&mut self, d: usize, label: &str, c: u64) -> Result<()> {
        let key = (d, label.to_string());
        match self.counts.get_mut(&key) {
            Some(v) if *v >= c => {
                *v -= c;
                if *v == 0 {
                    self.counts.remove(&key);
                }
                Ok(())
            }
            _ => Err(Error::NoSuchCell { dim: d, label: label.to_string() }),
        }
    }

    pub fn merge(&mut self, other: &CellInventory) {
        for ((d, l), &c) in &other.counts {
            self.add(*d, l, c);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Nonzero entries in `(dimension, label)` order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &str, u64)> {
        self.counts.iter().map(|((d, l), &c)| (*d, l.as_str(), c))
    }

    pub fn count_in_dim(&self, d: usize) -> u64 {
        self.iter().filter(|&(e, _, _)| e == d).map(|(_, _, c)| c).sum()
    }

    pub fn max_dim(&self) -> Option<usize> {
        self.counts.keys().map(|(d, _)| *d).max()
    }

    pub fn labels(&self) -> BTreeSet<String> {
        self.counts.keys().map(|(_, l)| l.clone()).collect()
    }

    pub fn to_cells(&self) -> Vec<(usize, String, u64)> {
        self.iter().map(|(d, l, c)| (d, l.to_string(), c)).collect()
    }
}

/// Replace one `d`-cell of the given isotropy by a `(d+2)`-cell of the same
/// isotropy.
pub fn trade_cell(inv: &CellInventory, d: usize, label: &str) -> Result<CellInventory> {
    let mut out = inv.clone();
    out.remove(d, label, 1)?;
    out.add(d + 2, label, 1);
    Ok(out)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerCharacteristic {
    pub per_label: BTreeMap<String, i64>,
    pub total: i64,
}

pub fn euler_characteristic(inv: &CellInventory) -> EulerCharacteristic {
    let mut e = EulerCharacteristic::default();
    for (d, l, c) in inv.iter() {
        let v = if d % 2 == 0 { c as i64 } else { -(c as i64) };
        *e.per_label.entry(l.to_string()).or_insert(0) += v;
        e.total += v;
    }
    e
}

/// One step of a filtration. Stage 0 holds the cells of `X_0`; stage `i ≥ 1`
/// holds the cells of `X_i ∖ X_{i−1}` and the connectivity of `(X_i, X_{i−1})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageJson {
    pub cells: Vec<(usize, String, u64)>,
    pub connectivity: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleJson {
    pub labels: Vec<String>,
    pub stages: Vec<StageJson>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationSchedule {
    pub labels: BTreeSet<String>,
    pub stages: Vec<CellInventory>,
    pub connectivity: Vec<i64>,
}

impl FiltrationSchedule {
    pub fn new(labels: BTreeSet<String>, stages: Vec<CellInventory>, connectivity: Vec<i64>) -> Result<Self> {
        if stages.len() != connectivity.len() {
            return Err(Error::Schema("one connectivity value per stage".into()));
        }
        if stages.is_empty() {
            return Err(Error::Schema("schedule has no stages".into()));
        }
        for s in &stages {
            if let Some(l) = s.labels().into_iter().find(|l| !labels.contains(l)) {
                return Err(Error::Schema(format!("undeclared isotropy label `{l}`")));
            }
        }
        Ok(FiltrationSchedule { labels, stages, connectivity })
    }

    pub fn from_json(j: &ScheduleJson) -> Result<Self> {
        let labels: BTreeSet<String> = j.labels.iter().cloned().collect();
        if labels.len() != j.labels.len() {
            return Err(Error::Schema("duplicate isotropy label".into()));
        }
        let stages = j.stages.iter().map(|s| CellInventory::from_cells(s.cells.iter().cloned())).collect();
        Self::new(labels, stages, j.stages.iter().map(|s| s.connectivity).collect())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let j: ScheduleJson = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        Self::from_json(&j)
    }

    pub fn to_json(&self) -> ScheduleJson {
        ScheduleJson {
            labels: self.labels.iter().cloned().collect(),
            stages: self
                .stages
                .iter()
                .zip(&self.connectivity)
                .map(|(s, &c)| StageJson { cells: s.to_cells(), connectivity: c })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    /// Union of the first `len` stages.
    pub fn total(&self, len: usize) -> CellInventory {
        let mut inv = CellInventory::new();
        for s in self.stages.iter().take(len) {
            inv.merge(s);
        }
        inv
    }

    /// `(X_i, X_{i−1})` is `(i−1)`-connected for every `i ≥ 1`.
    pub fn check_sparsified(&self) -> Result<()> {
        for (i, &c) in self.connectivity.iter().enumerate().skip(1) {
            if c < i as i64 - 1 {
                return Err(Error::NotSparsified { stage: i, found: c, needed: i as i64 - 1 });
            }
        }
        Ok(())
    }
}

/// A sparsified schedule with `selected[k]` the original index `n_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sparsified {
    pub schedule: FiltrationSchedule,
    pub selected: Vec<usize>,
}

/// Picks `n_0 < n_1 < …` where `n_k` is the least index after `n_{k−1}` from
/// which every later pair in the prefix is `k`-connected. The last stage is
/// taken once it is the only one left.
pub fn sparsify(s: &FiltrationSchedule) -> Result<Sparsified> {
    let len = s.len();
    let c = &s.connectivity;
    let tail_ok = |m: usize, k: i64| (m + 1..len).all(|i| c[i] >= k);
    let mut selected: Vec<usize> = Vec::new();
    loop {
        let start = selected.last().map_or(0, |&p| p + 1);
        if start == len {
            break;
        }
        let k = selected.len() as i64;
        match (start..len.saturating_sub(1)).find(|&m| tail_ok(m, k)) {
            Some(m) => selected.push(m),
            None if start == len - 1 => selected.push(start),
            None => return Err(Error::Unreachable(k)),
        }
    }
    let mut stages = Vec::with_capacity(selected.len());
    let mut connectivity = Vec::with_capacity(selected.len());
    let mut prev = 0;
    for (k, &n) in selected.iter().enumerate() {
        let lo = if k == 0 { 0 } else { prev + 1 };
        let mut inv = CellInventory::new();
        for st in &s.stages[lo..=n] {
            inv.merge(st);
        }
        stages.push(inv);
        connectivity.push(if k == 0 { c[0] } else { c[lo..=n].iter().copied().min().unwrap_or(c[n]) });
        prev = n;
    }
    Ok(Sparsified { schedule: FiltrationSchedule::new(s.labels.clone(), stages, connectivity)?, selected })
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TradeEvent {
    pub stage: usize,
    pub dim: usize,
    pub label: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TradeLog {
    pub events: Vec<TradeEvent>,
}

impl TradeLog {
    /// Applies every event, in order, to `inv`.
    pub fn replay(&self, inv: &CellInventory) -> Result<CellInventory> {
        let mut out = inv.clone();
        for e in &self.events {
            out = trade_cell(&out, e.dim, &e.label)?;
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StaircaseRun {
    pub input: CellInventory,
    pub output: CellInventory,
    pub log: TradeLog,
    /// `stable[d]`: the `d`-cell count of `X_d` after row `d+1`.
    pub stable: Vec<u64>,
}

/// Row `l` trades every `(l−1)`-cell of the stages after `l−1`. The output is
/// the diagonal colimit over the first `prefix` stages.
pub fn run_staircase(s: &FiltrationSchedule, prefix: usize) -> Result<StaircaseRun> {
    s.check_sparsified()?;
    if prefix == 0 || prefix > s.len() {
        return Err(Error::Precondition(format!("prefix {prefix} outside 1..={}", s.len())));
    }
    let mut stages: Vec<CellInventory> = s.stages[..prefix].to_vec();
    let mut log = TradeLog::default();
    let mut stable = Vec::with_capacity(prefix);
    for l in 1..=prefix {
        for (j, stage) in stages.iter_mut().enumerate().skip(l) {
            let cells: Vec<(String, u64)> =
                stage.iter().filter(|&(d, _, _)| d == l - 1).map(|(_, lb, c)| (lb.to_string(), c)).collect();
            for (label, c) in cells {
                for _ in 0..c {
                    *stage = trade_cell(stage, l - 1, &label)?;
                    log.events.push(TradeEvent { stage: j, dim: l - 1, label: label.clone() });
                }
            }
        }
        let d = l - 1;
        stable.push(stages[..=d].iter().map(|st| st.count_in_dim(d)).sum());
    }
    let mut output = CellInventory::new();
    for st in &stages {
        output.merge(st);
    }
    let run = StaircaseRun { input: s.total(prefix), output, log, stable };
    if let Some(d) = (0..prefix).find(|&d| run.output.count_in_dim(d) != run.stable[d]) {
        return Err(Error::Postcondition(format!("dimension {d} did not stabilize")));
    }
    Ok(run)
}
