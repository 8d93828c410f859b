use crate::data::{LabelKind, LabeledDataset};
use crate::error::{Error, Result};
use crate::models::{DecisionTree, TreeNode};

/// Midpoints between consecutive distinct values of each feature.
pub fn default_thresholds(d: &LabeledDataset) -> Vec<Vec<f64>> {
    (0..d.dim())
        .map(|j| {
            let mut v = d.features().col(j);
            v.sort_by(f64::total_cmp);
            v.dedup();
            v.windows(2).map(|p| 0.5 * (p[0] + p[1])).collect()
        })
        .collect()
}

fn mean(labels: &[f64], idx: &[usize]) -> f64 {
    idx.iter().map(|&i| labels[i]).sum::<f64>() / idx.len() as f64
}

fn sse(labels: &[f64], idx: &[usize]) -> f64 {
    let mu = mean(labels, idx);
    idx.iter().map(|&i| (labels[i] - mu).powi(2)).sum()
}

struct Region {
    indices: Vec<usize>,
    depth: usize,
}

struct Split {
    feature: usize,
    threshold: f64,
    gain: f64,
    yes: Vec<usize>,
    no: Vec<usize>,
}

/// Smallest squared-error improvement counted as a genuine decrease.
const MIN_GAIN: f64 = 1e-12;

fn best_split(d: &LabeledDataset, region: &Region, thresholds: &[Vec<f64>]) -> Option<Split> {
    let labels = d.labels();
    let parent = sse(labels, &region.indices);
    let mut best: Option<Split> = None;
    for (j, ts) in thresholds.iter().enumerate() {
        for &t in ts {
            let (yes, no): (Vec<usize>, Vec<usize>) =
                region.indices.iter().partition(|&&i| d.features().get(i, j) <= t);
            if yes.is_empty() || no.is_empty() {
                continue;
            }
            let gain = parent - sse(labels, &yes) - sse(labels, &no);
            if gain > MIN_GAIN * parent.max(1.0) && best.as_ref().is_none_or(|b| gain > b.gain) {
                best = Some(Split {
                    feature: j,
                    threshold: t,
                    gain,
                    yes,
                    no,
                });
            }
        }
    }
    best
}

enum Slot {
    Leaf(Region),
    Test {
        feature: usize,
        threshold: f64,
        yes: usize,
        no: usize,
    },
}

/// Greedy tree growth.
///
/// Starting from a single leaf, the expansion (leaf, feature, threshold) that
/// most reduces the squared-error risk of mean-valued leaves is applied until
/// no expansion helps or every leaf sits at `max_depth`. Leaves predict the
/// label mean, or the majority label (ties to `+1`) for binary labels.
pub fn grow_tree(
    d: &LabeledDataset,
    max_depth: usize,
    candidate_thresholds: Option<&[Vec<f64>]>,
) -> Result<DecisionTree> {
    d.require_labels()?;
    if d.is_empty() {
        return Err(Error::Size("cannot grow a tree on an empty dataset".into()));
    }
    let defaults;
    let thresholds = match candidate_thresholds {
        Some(t) => {
            if t.len() != d.dim() {
                return Err(Error::Shape(format!(
                    "{} threshold lists for {} features",
                    t.len(),
                    d.dim()
                )));
            }
            t
        }
        None => {
            defaults = default_thresholds(d);
            &defaults
        }
    };

    let mut slots = vec![Slot::Leaf(Region {
        indices: (0..d.len()).collect(),
        depth: 0,
    })];
    loop {
        let mut chosen: Option<(usize, Split)> = None;
        for (s, slot) in slots.iter().enumerate() {
            if let Slot::Leaf(region) = slot {
                if region.depth >= max_depth {
                    continue;
                }
                if let Some(split) = best_split(d, region, thresholds) {
                    if chosen.as_ref().is_none_or(|(_, c)| split.gain > c.gain) {
                        chosen = Some((s, split));
                    }
                }
            }
        }
        let Some((s, split)) = chosen else { break };
        let depth = match &slots[s] {
            Slot::Leaf(r) => r.depth + 1,
            Slot::Test { .. } => unreachable!("only leaves are expanded"),
        };
        let yes = slots.len();
        slots.push(Slot::Leaf(Region {
            indices: split.yes,
            depth,
        }));
        slots.push(Slot::Leaf(Region {
            indices: split.no,
            depth,
        }));
        slots[s] = Slot::Test {
            feature: split.feature,
            threshold: split.threshold,
            yes,
            no: yes + 1,
        };
    }

    let binary = d.label_kind() == LabelKind::Binary;
    fn build(slots: &[Slot], s: usize, labels: &[f64], binary: bool) -> TreeNode {
        match &slots[s] {
            Slot::Leaf(region) => {
                let mu = mean(labels, &region.indices);
                let value = if binary { crate::models::classify(mu) } else { mu };
                TreeNode::leaf(value)
            }
            Slot::Test {
                feature,
                threshold,
                yes,
                no,
            } => TreeNode::test(
                *feature,
                *threshold,
                build(slots, *yes, labels, binary),
                build(slots, *no, labels, binary),
            ),
        }
    }
    DecisionTree::new(build(&slots, 0, d.labels(), binary), max_depth)
}
