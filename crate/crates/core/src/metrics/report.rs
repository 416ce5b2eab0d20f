use serde::{Deserialize, Serialize};

use super::{MetricError, MetricGroup, MetricName, MetricScore};

/// Group averages and the overall score, all in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupScores {
    pub structural: f64,
    pub usability: f64,
    pub fidelity: f64,
    pub overall: f64,
}

impl GroupScores {
    pub fn group(&self, g: MetricGroup) -> f64 {
        match g {
            MetricGroup::Structural => self.structural,
            MetricGroup::Usability => self.usability,
            MetricGroup::Fidelity => self.fidelity,
        }
    }
}

/// Group means and overall from nine values in [`MetricName::ALL`] order.
/// Overall is the mean of the group means.
pub fn aggregate_values(values: &[f64; 9]) -> GroupScores {
    let mean = |g: MetricGroup| {
        let v: Vec<f64> = MetricName::ALL
            .iter()
            .filter(|m| m.group() == g)
            .map(|m| values[m.index()])
            .collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let structural = mean(MetricGroup::Structural);
    let usability = mean(MetricGroup::Usability);
    let fidelity = mean(MetricGroup::Fidelity);
    GroupScores {
        structural,
        usability,
        fidelity,
        overall: (structural + usability + fidelity) / 3.0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentReport {
    pub doc_id: String,
    /// One score per metric, in [`MetricName::ALL`] order.
    pub scores: Vec<MetricScore>,
    #[serde(flatten)]
    pub groups: GroupScores,
}

impl DocumentReport {
    pub fn score(&self, name: MetricName) -> &MetricScore {
        &self.scores[name.index()]
    }

    pub fn value(&self, name: MetricName) -> f64 {
        self.score(name).value
    }

    pub fn values(&self) -> [f64; 9] {
        let mut out = [0.0; 9];
        for (o, s) in out.iter_mut().zip(&self.scores) {
            *o = s.value;
        }
        out
    }
}

/// Combine nine scores (any order) into a report.
pub fn aggregate_report(
    doc_id: impl Into<String>,
    scores: Vec<MetricScore>,
) -> Result<DocumentReport, MetricError> {
    let mut slots: [Option<MetricScore>; 9] = Default::default();
    for s in scores {
        let slot = &mut slots[s.name.index()];
        if slot.is_some() {
            return Err(MetricError::DuplicateScore(s.name));
        }
        *slot = Some(s);
    }
    let missing: Vec<MetricName> = MetricName::ALL
        .into_iter()
        .filter(|m| slots[m.index()].is_none())
        .collect();
    if !missing.is_empty() {
        return Err(MetricError::IncompleteScores(missing));
    }
    let scores: Vec<MetricScore> = slots.into_iter().flatten().collect();
    let mut values = [0.0; 9];
    for (v, s) in values.iter_mut().zip(&scores) {
        *v = s.value;
    }
    Ok(DocumentReport {
        doc_id: doc_id.into(),
        groups: aggregate_values(&values),
        scores,
    })
}
