use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{PricingError, Result};

/// Monthly rate used to discount payments.
pub const DEFAULT_RATE: f64 = 0.0012;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoanRecord {
    pub loan_amount: f64,
    pub fico: f64,
    pub prime_rate: f64,
    pub competitor_rate: f64,
    pub monthly_payment: f64,
    pub term: u32,
    pub accepted: u8,
    pub state: String,
}

impl LoanRecord {
    pub fn validate(&self) -> Result<()> {
        let money = [self.loan_amount, self.monthly_payment];
        if self.term == 0 || money.iter().any(|m| !m.is_finite() || *m < 0.0) || self.accepted > 1 {
            return Err(PricingError::Data(format!("invalid loan record {self:?}")));
        }
        if [self.fico, self.prime_rate, self.competitor_rate].iter().any(|v| !v.is_finite()) {
            return Err(PricingError::NonFinite("loan features"));
        }
        Ok(())
    }

    pub fn features(&self) -> [f64; 4] {
        [self.loan_amount, self.fico, self.prime_rate, self.competitor_rate]
    }

    pub fn accepted(&self) -> bool {
        self.accepted == 1
    }
}

/// `(payment·Σ_{τ=1}^{term} (1+rate)^{−τ} − loan) / 1000`.
pub fn compute_price(record: &LoanRecord, rate: f64) -> f64 {
    let n = f64::from(record.term);
    let annuity = if rate == 0.0 { n } else { (1.0 - (1.0 + rate).powf(-n)) / rate };
    (record.monthly_payment * annuity - record.loan_amount) / 1000.0
}

pub fn read_records(path: &Path) -> Result<Vec<LoanRecord>> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for row in reader.deserialize() {
        let rec: LoanRecord = row?;
        rec.validate()?;
        out.push(rec);
    }
    Ok(out)
}

pub fn write_records(records: &[LoanRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Keeps records of one region, matched case-insensitively.
pub fn filter_state(records: Vec<LoanRecord>, state: Option<&str>) -> Vec<LoanRecord> {
    match state {
        None => records,
        Some(s) => records.into_iter().filter(|r| r.state.eq_ignore_ascii_case(s)).collect(),
    }
}

/// Divides each feature by its column maximum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureScaler {
    pub maxima: [f64; 4],
}

impl FeatureScaler {
    pub fn fit(records: &[LoanRecord]) -> Result<Self> {
        if records.is_empty() {
            return Err(PricingError::Data("no records to scale".into()));
        }
        let mut maxima = [f64::NEG_INFINITY; 4];
        for r in records {
            for (m, v) in maxima.iter_mut().zip(r.features()) {
                *m = m.max(v);
            }
        }
        if maxima.iter().any(|m| !(*m > 0.0)) {
            return Err(PricingError::Data(format!("feature maxima must be positive, got {maxima:?}")));
        }
        if records.iter().any(|r| r.features().iter().any(|v| *v < 0.0)) {
            return Err(PricingError::Data("features must be nonnegative".into()));
        }
        Ok(Self { maxima })
    }

    pub fn scale(&self, features: [f64; 4]) -> Vec<f64> {
        features.iter().zip(&self.maxima).map(|(v, m)| v / m).collect()
    }

    pub fn unscale(&self, scaled: &[f64]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (o, (v, m)) in out.iter_mut().zip(scaled.iter().zip(&self.maxima)) {
            *o = v * m;
        }
        out
    }
}
