//! Year-indexed series: moving averages, exponential fits, growth rates.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `(year, value)` points with strictly increasing years; gaps allowed.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct YearSeries {
    points: Vec<(i32, f64)>,
}

impl YearSeries {
    pub fn new(points: Vec<(i32, f64)>) -> Result<Self> {
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidArgument("series years must be strictly increasing".into()));
        }
        Ok(YearSeries { points })
    }

    pub fn from_map(map: &BTreeMap<i32, f64>) -> Self {
        YearSeries {
            points: map.iter().map(|(&y, &v)| (y, v)).collect(),
        }
    }

    pub fn points(&self) -> &[(i32, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, year: i32) -> Option<f64> {
        self.points
            .binary_search_by_key(&year, |p| p.0)
            .ok()
            .map(|i| self.points[i].1)
    }

    /// CSV with header `year,value`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["year", "value"])?;
        for (y, v) in &self.points {
            w.write_record([y.to_string(), v.to_string()])?;
        }
        w.flush().map_err(|e| Error::io("<series csv>", e))?;
        Ok(())
    }
}

/// Trailing mean over the points whose year falls in `(y - window, y]`,
/// emitted for each point from the first year with a full window onwards.
pub fn moving_average(s: &YearSeries, window: u32) -> Result<YearSeries> {
    if window == 0 {
        return Err(Error::InvalidArgument("window must be at least 1".into()));
    }
    let Some(&(first, _)) = s.points.first() else {
        return Ok(YearSeries::default());
    };
    let w = window as i64;
    let mut out = Vec::new();
    let mut start = 0;
    for (end, &(year, _)) in s.points.iter().enumerate() {
        while (s.points[start].0 as i64) <= year as i64 - w {
            start += 1;
        }
        if year as i64 >= first as i64 + w - 1 {
            let window = &s.points[start..=end];
            out.push((year, window.iter().map(|p| p.1).sum::<f64>() / window.len() as f64));
        }
    }
    Ok(YearSeries { points: out })
}

/// Result of a log-linear fit `y = a·e^(b·year)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpFit {
    pub a: f64,
    pub b: f64,
    /// Coefficient of determination of the regression of ln(y) on year.
    pub r2: f64,
    pub n: usize,
}

impl ExpFit {
    pub fn predict(&self, year: f64) -> f64 {
        self.a * (self.b * year).exp()
    }
}

/// Ordinary least squares of ln(y) on year, skipping nonpositive values.
pub fn exp_fit(s: &YearSeries) -> Result<ExpFit> {
    let pts: Vec<(f64, f64)> = s
        .points
        .iter()
        .filter(|p| p.1 > 0.0 && p.1.is_finite())
        .map(|&(y, v)| (y as f64, v.ln()))
        .collect();
    let n = pts.len();
    if n < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: n });
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in &pts {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("all points share one year".into()));
    }
    let b = sxy / sxx;
    let intercept = my - b * mx;
    let ss_res: f64 = pts
        .iter()
        .map(|&(x, y)| {
            let r = y - (intercept + b * x);
            r * r
        })
        .sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(ExpFit {
        a: intercept.exp(),
        b,
        r2,
        n,
    })
}

/// Compound annual growth rate between the first and last points.
pub fn annual_growth_rate(s: &YearSeries) -> Result<f64> {
    let (Some(&(y0, v0)), Some(&(y1, v1))) = (s.points.first(), s.points.last()) else {
        return Err(Error::TooFewPoints { needed: 2, got: 0 });
    };
    if v0 <= 0.0 || v1 <= 0.0 {
        return Err(Error::NonPositiveEndpoints);
    }
    if y1 == y0 {
        return Err(Error::TooFewPoints { needed: 2, got: 1 });
    }
    Ok((v1 / v0).powf(1.0 / f64::from(y1 - y0)) - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(points: &[(i32, f64)]) -> YearSeries {
        YearSeries::new(points.to_vec()).unwrap()
    }

    #[test]
    fn rejects_unsorted_years() {
        assert!(YearSeries::new(vec![(2001, 1.0), (2000, 1.0)]).is_err());
        assert!(YearSeries::new(vec![(2001, 1.0), (2001, 1.0)]).is_err());
    }

    #[test]
    fn moving_average_cases() {
        let s = series(&[(1, 1.0), (2, 2.0), (3, 3.0), (4, 4.0), (5, 5.0), (6, 6.0)]);
        assert_eq!(moving_average(&s, 6).unwrap().points(), &[(6, 3.5)]);
        assert_eq!(moving_average(&s, 1).unwrap(), s);
        let c = series(&[(2000, 4.0), (2001, 4.0), (2002, 4.0), (2003, 4.0)]);
        assert!(moving_average(&c, 3).unwrap().points().iter().all(|p| p.1 == 4.0));
        assert!(moving_average(&s, 0).is_err());
    }

    #[test]
    fn moving_average_with_gap() {
        let s = series(&[(2000, 2.0), (2001, 4.0), (2004, 6.0), (2005, 8.0)]);
        // windows: 2001 -> {2000,2001}; 2004 -> {2004}; 2005 -> {2004,2005}
        assert_eq!(moving_average(&s, 2).unwrap().points(), &[(2001, 3.0), (2004, 6.0), (2005, 7.0)]);
    }

    #[test]
    fn exp_fit_noiseless() {
        let pts: Vec<(i32, f64)> = (1950..2010).map(|y| (y, 2.0 * (0.1 * y as f64).exp())).collect();
        let fit = exp_fit(&series(&pts)).unwrap();
        assert!((fit.a - 2.0).abs() / 2.0 < 1e-9, "{fit:?}");
        assert!((fit.b - 0.1).abs() / 0.1 < 1e-9);
        assert!((fit.r2 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn exp_fit_skips_zeros_and_needs_three() {
        let s = series(&[(1, 0.0), (2, 1.0), (3, 0.0), (4, 2.0)]);
        assert!(matches!(exp_fit(&s), Err(Error::TooFewPoints { needed: 3, got: 2 })));
    }

    #[test]
    fn growth_rate() {
        let s = series(&[(2000, 5.0), (2005, 5.0)]);
        assert_eq!(annual_growth_rate(&s).unwrap(), 0.0);
        let d = series(&[(2000, 10.0), (2004, 13.0), (2010, 20.0)]);
        assert!((annual_growth_rate(&d).unwrap() - 0.071_773_462_536_293_13).abs() < 1e-12);
        assert!(annual_growth_rate(&series(&[(2000, 0.0), (2001, 1.0)])).is_err());
    }

    #[test]
    fn csv_export() {
        let mut buf = Vec::new();
        series(&[(2000, 1.5)]).write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "year,value\n2000,1.5\n");
    }
}
