use std::fmt;

use serde::{Deserialize, Serialize};

use super::DecodeError;

/// Sample indices chosen in a vehicle's depot and terminal clusters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash, Serialize, Deserialize)]
pub struct EndpointSamples {
    pub depot: usize,
    pub terminal: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gene {
    /// 0-based task cluster and sample index.
    Task { cluster: usize, sample: usize },
    /// Payload only on odd-numbered delimiters.
    Delimiter { payload: Option<EndpointSamples> },
}

impl Gene {
    pub fn is_delimiter(&self) -> bool {
        matches!(self, Gene::Delimiter { .. })
    }

    pub fn cluster(&self) -> Option<usize> {
        match *self {
            Gene::Task { cluster, .. } => Some(cluster),
            Gene::Delimiter { .. } => None,
        }
    }
}

/// One vehicle's slice of a chromosome.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub payload: Option<EndpointSamples>,
    /// `(gene position, cluster, sample)` in visiting order.
    pub tasks: Vec<(usize, usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chromosome {
    pub genes: Vec<Gene>,
    /// Cached objective, `INFINITY` until evaluated.
    pub cost: f64,
}

impl Chromosome {
    pub fn new(genes: Vec<Gene>) -> Self {
        Self {
            genes,
            cost: f64::INFINITY,
        }
    }

    /// `[D(p1), tasks1.., E, D(p2), tasks2.., E, …]`.
    pub fn from_segments(segments: &[(EndpointSamples, Vec<(usize, usize)>)]) -> Self {
        let mut genes = Vec::new();
        for (k, (ep, tasks)) in segments.iter().enumerate() {
            if k > 0 {
                genes.push(Gene::Delimiter { payload: None });
            }
            genes.push(Gene::Delimiter { payload: Some(*ep) });
            genes.extend(
                tasks
                    .iter()
                    .map(|&(cluster, sample)| Gene::Task { cluster, sample }),
            );
        }
        Self::new(genes)
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    /// Payloads in left-to-right order.
    pub fn payloads(&self) -> Vec<EndpointSamples> {
        self.genes
            .iter()
            .filter_map(|g| match g {
                Gene::Delimiter { payload } => *payload,
                _ => None,
            })
            .collect()
    }

    /// Moves payloads so that the k-th payload (in order) sits on the k-th
    /// odd-numbered delimiter. Missing payloads default to sample 0.
    pub fn fixup(&mut self) {
        let payloads = self.payloads();
        self.assign_payloads(&payloads);
    }

    /// Puts `payloads[k]` on the k-th odd-numbered delimiter, clearing the rest.
    pub fn assign_payloads(&mut self, payloads: &[EndpointSamples]) {
        let mut ordinal = 0usize;
        for g in self.genes.iter_mut() {
            if let Gene::Delimiter { payload } = g {
                *payload = if ordinal % 2 == 0 {
                    Some(payloads.get(ordinal / 2).copied().unwrap_or_default())
                } else {
                    None
                };
                ordinal += 1;
            }
        }
    }

    /// Splits at even-numbered delimiters.
    pub fn segments(&self) -> Vec<Segment> {
        let mut out = vec![Segment {
            payload: None,
            tasks: Vec::new(),
        }];
        let mut ordinal = 0usize;
        for (pos, g) in self.genes.iter().enumerate() {
            match *g {
                Gene::Task { cluster, sample } => {
                    out.last_mut().unwrap().tasks.push((pos, cluster, sample))
                }
                Gene::Delimiter { payload } => {
                    if ordinal % 2 == 1 {
                        out.push(Segment {
                            payload: None,
                            tasks: Vec::new(),
                        });
                    } else if let Some(p) = payload {
                        out.last_mut().unwrap().payload = Some(p);
                    }
                    ordinal += 1;
                }
            }
        }
        out
    }

    /// Index of the vehicle segment containing gene `pos`; a divider
    /// belongs to the segment it opens.
    pub fn vehicle_of(&self, pos: usize) -> usize {
        let mut ordinal = 0usize;
        let mut segment = 0usize;
        for g in &self.genes[..=pos] {
            if g.is_delimiter() {
                if ordinal % 2 == 1 {
                    segment += 1;
                }
                ordinal += 1;
            }
        }
        segment
    }

    /// Checks every structural invariant for `n` tasks, `m` vehicles,
    /// `samples` nodes per task cluster and `endpoint_samples` nodes per
    /// depot/terminal cluster.
    pub fn validate(
        &self,
        n: usize,
        m: usize,
        samples: usize,
        endpoint_samples: usize,
    ) -> Result<(), DecodeError> {
        let bad = |msg: String| Err(DecodeError::Malformed(msg));
        if self.genes.len() != n + 2 * m - 1 {
            return bad(format!(
                "length {} but expected {}",
                self.genes.len(),
                n + 2 * m - 1
            ));
        }
        let mut seen = vec![false; n];
        let mut ordinal = 0usize;
        for (pos, g) in self.genes.iter().enumerate() {
            match *g {
                Gene::Task { cluster, sample } => {
                    if cluster >= n {
                        return bad(format!("gene {pos}: cluster {cluster} out of range"));
                    }
                    if sample >= samples {
                        return bad(format!("gene {pos}: sample {sample} out of range"));
                    }
                    if std::mem::replace(&mut seen[cluster], true) {
                        return bad(format!("cluster {cluster} appears twice"));
                    }
                }
                Gene::Delimiter { payload } => {
                    let odd_numbered = ordinal % 2 == 0;
                    match (odd_numbered, payload) {
                        (true, None) => {
                            return bad(format!("delimiter {} lacks its payload", ordinal + 1))
                        }
                        (false, Some(_)) => {
                            return bad(format!("divider {} carries a payload", ordinal + 1))
                        }
                        (true, Some(p))
                            if p.depot >= endpoint_samples || p.terminal >= endpoint_samples =>
                        {
                            return bad(format!(
                                "delimiter {} payload {p:?} out of range",
                                ordinal + 1
                            ))
                        }
                        _ => {}
                    }
                    ordinal += 1;
                }
            }
        }
        if ordinal != 2 * m - 1 {
            return bad(format!("{ordinal} delimiters but expected {}", 2 * m - 1));
        }
        Ok(())
    }

    /// Multiset of clusters is exactly `0..n`.
    pub fn clusters_sorted(&self) -> Vec<usize> {
        let mut c: Vec<usize> = self.genes.iter().filter_map(Gene::cluster).collect();
        c.sort_unstable();
        c
    }
}

impl fmt::Display for Chromosome {
    /// 1-based rendering, e.g. `M(1,1) 1.1 2.3 M M(1,1) 4.2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.genes.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match g {
                Gene::Task { cluster, sample } => write!(f, "{}.{}", cluster + 1, sample + 1)?,
                Gene::Delimiter { payload: Some(p) } => {
                    write!(f, "M({},{})", p.depot + 1, p.terminal + 1)?
                }
                Gene::Delimiter { payload: None } => f.write_str("M")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(c: usize, s: usize) -> Gene {
        Gene::Task {
            cluster: c - 1,
            sample: s - 1,
        }
    }
    fn d(depot: usize, terminal: usize) -> Gene {
        Gene::Delimiter {
            payload: Some(EndpointSamples { depot, terminal }),
        }
    }
    const E: Gene = Gene::Delimiter { payload: None };

    #[test]
    fn fixup_moves_payload_to_odd_delimiter() {
        let mut c = Chromosome::new(vec![
            d(0, 2),
            t(1, 1),
            t(5, 1),
            t(4, 2),
            d(1, 0),
            E,
            t(3, 3),
            t(2, 3),
        ]);
        c.fixup();
        assert_eq!(c.genes[4], E);
        assert_eq!(c.genes[5], d(1, 0));
        // Idempotent.
        let before = c.clone();
        c.fixup();
        assert_eq!(c, before);
    }

    #[test]
    fn segments_follow_dividers() {
        let c = Chromosome::new(vec![
            t(1, 1),
            t(2, 1),
            t(3, 1),
            d(0, 0),
            E,
            t(4, 1),
            t(5, 1),
            d(0, 0),
        ]);
        let segs = c.segments();
        assert_eq!(segs.len(), 2);
        assert_eq!(
            segs[0].tasks.iter().map(|x| x.1).collect::<Vec<_>>(),
            vec![0, 1, 2]
        );
        assert_eq!(
            segs[1].tasks.iter().map(|x| x.1).collect::<Vec<_>>(),
            vec![3, 4]
        );
        assert_eq!(c.vehicle_of(0), 0);
        assert_eq!(c.vehicle_of(3), 0);
        assert_eq!(c.vehicle_of(4), 1);
        assert_eq!(c.vehicle_of(7), 1);
    }

    #[test]
    fn validation_catches_errors() {
        let good = Chromosome::new(vec![d(0, 0), t(1, 1), E, d(0, 0), t(2, 1)]);
        assert!(good.validate(2, 2, 1, 1).is_ok());
        let dup = Chromosome::new(vec![d(0, 0), t(1, 1), E, d(0, 0), t(1, 1)]);
        assert!(dup.validate(2, 2, 1, 1).is_err());
        let misplaced = Chromosome::new(vec![d(0, 0), t(1, 1), d(0, 0), E, t(2, 1)]);
        assert!(misplaced.validate(2, 2, 1, 1).is_err());
        assert!(good.validate(3, 2, 1, 1).is_err());
    }

    #[test]
    fn display_is_one_based() {
        let c = Chromosome::new(vec![d(0, 2), t(1, 1), E, d(1, 0), t(4, 2)]);
        assert_eq!(c.to_string(), "M(1,3) 1.1 M M(2,1) 4.2");
    }
}
