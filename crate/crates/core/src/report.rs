//! JSON run report written by the `correct` and `tv-correct` commands.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mire,
    Tv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub sigma: f64,
    pub tv: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub input_path: String,
    pub method: Method,
    pub sigma_used: Option<f64>,
    pub rmse_vs_truth: Option<f64>,
    pub tv_before: f64,
    pub tv_after: f64,
    /// Wall time of the correction call alone, excluding file IO.
    pub runtime_ms: f64,
    pub trace: Option<Vec<TracePoint>>,
}

impl MetricsReport {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report is always serializable");
        text.push('\n');
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let report = MetricsReport {
            input_path: "in.pgm".into(),
            method: Method::Mire,
            sigma_used: Some(1.5),
            rmse_vs_truth: None,
            tv_before: 10.0,
            tv_after: 8.0,
            runtime_ms: 3.25,
            trace: Some(vec![TracePoint {
                sigma: 0.0,
                tv: 10.0,
            }]),
        };
        let value: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(value["method"], "mire");
        assert_eq!(value["rmse_vs_truth"], serde_json::Value::Null);
        assert_eq!(value["trace"][0]["sigma"], 0.0);
        assert_eq!(
            serde_json::from_value::<MetricsReport>(value).unwrap(),
            report
        );
    }
}
