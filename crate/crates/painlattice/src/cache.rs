//! On-disk polynomial cache.
//!
//! One JSON document per polynomial, keyed by (family, n), with coefficients
//! stored as decimal numerator/denominator string pairs so downstream runs
//! never recompute the exact families.

use crate::error::{Error, Result};
use crate::exact::{discriminant_poly, vy_polynomials, ExactPoly};
use rug::Rational;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "VY")]
    Vy,
    #[serde(rename = "DISC")]
    Disc,
}

impl Family {
    fn tag(self) -> &'static str {
        match self {
            Family::Vy => "VY",
            Family::Disc => "DISC",
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct PolyRecord {
    family: Family,
    n: usize,
    /// [numerator-string, denominator-string] pairs, ascending degree.
    coeffs: Vec<[String; 2]>,
}

impl PolyRecord {
    fn from_poly(family: Family, n: usize, poly: &ExactPoly) -> Self {
        PolyRecord {
            family,
            n,
            coeffs: poly
                .coeffs()
                .iter()
                .map(|c| [c.numer().to_string(), c.denom().to_string()])
                .collect(),
        }
    }

    fn to_poly(&self) -> Result<ExactPoly> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for [num, den] in &self.coeffs {
            let n: rug::Integer = num
                .parse()
                .map_err(|_| Error::Cache(format!("bad numerator {num:?}")))?;
            let d: rug::Integer = den
                .parse()
                .map_err(|_| Error::Cache(format!("bad denominator {den:?}")))?;
            if d == 0 {
                return Err(Error::Cache("zero denominator".into()));
            }
            coeffs.push(Rational::from((n, d)));
        }
        Ok(ExactPoly::new(coeffs))
    }
}

/// Directory-backed cache for the exact polynomial families.
#[derive(Debug, Clone)]
pub struct PolyCache {
    dir: PathBuf,
}

impl PolyCache {
    pub fn new(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        std::fs::create_dir_all(&dir)?;
        Ok(PolyCache { dir })
    }

    /// Resolve the cache directory from an explicit choice, the
    /// `PAINLATTICE_CACHE` environment variable, or a default under the
    /// system temp directory, in that order.
    pub fn resolve(explicit: Option<&Path>) -> Result<Self> {
        if let Some(dir) = explicit {
            return PolyCache::new(dir);
        }
        if let Ok(dir) = std::env::var("PAINLATTICE_CACHE") {
            return PolyCache::new(dir);
        }
        PolyCache::new(std::env::temp_dir().join("painlattice-cache"))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, family: Family, n: usize) -> PathBuf {
        self.dir.join(format!("{}_{:03}.json", family.tag(), n))
    }

    pub fn load(&self, family: Family, n: usize) -> Result<Option<ExactPoly>> {
        let path = self.path_for(family, n);
        if !path.exists() {
            return Ok(None);
        }
        let text = std::fs::read_to_string(&path)?;
        let record: PolyRecord = serde_json::from_str(&text)?;
        if record.family != family || record.n != n {
            return Err(Error::Cache(format!(
                "cache file {} holds {:?}/{} instead of {:?}/{}",
                path.display(),
                record.family,
                record.n,
                family,
                n
            )));
        }
        Ok(Some(record.to_poly()?))
    }

    pub fn store(&self, family: Family, n: usize, poly: &ExactPoly) -> Result<()> {
        let record = PolyRecord::from_poly(family, n, poly);
        let path = self.path_for(family, n);
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, serde_json::to_string(&record)?)?;
        std::fs::rename(&tmp, &path)?;
        Ok(())
    }

    /// Y_0..Y_n, loading what exists and computing/storing the rest. A loaded
    /// family is re-verified through the defining recursion at one fresh node.
    pub fn vy_family(&self, n: usize) -> Result<Vec<ExactPoly>> {
        let mut cached = Vec::new();
        for k in 0..=n {
            match self.load(Family::Vy, k)? {
                Some(p) => cached.push(p),
                None => break,
            }
        }
        if cached.len() == n + 1 {
            verify_vy_at_node(&cached)?;
            return Ok(cached);
        }
        let family = vy_polynomials(n)?;
        for (k, p) in family.iter().enumerate() {
            if k >= cached.len() {
                self.store(Family::Vy, k, p)?;
            }
        }
        Ok(family)
    }

    /// D_n, from cache when present (re-verified against one fresh
    /// discriminant evaluation) or computed and stored.
    pub fn disc_poly(&self, n: usize) -> Result<ExactPoly> {
        if let Some(p) = self.load(Family::Disc, n)? {
            verify_disc_at_node(n, &p)?;
            return Ok(p);
        }
        let p = discriminant_poly(n)?;
        self.store(Family::Disc, n, &p)?;
        Ok(p)
    }
}

/// Check the recursion Y_{n+1}Y_{n−1} = tY_n² − 4(Y_n″Y_n − (Y_n′)²) at a
/// fresh node for the top of a loaded family.
fn verify_vy_at_node(family: &[ExactPoly]) -> Result<()> {
    if family.len() < 3 {
        if family.first().is_some_and(|y| *y != ExactPoly::one()) {
            return Err(Error::Cache("cached Y_0 is not 1".into()));
        }
        return Ok(());
    }
    let n = family.len() - 2;
    let t = Rational::from(3);
    let yn = &family[n];
    let d1 = yn.derivative();
    let d2 = d1.derivative();
    let lhs = family[n + 1].eval_rational(&t) * family[n - 1].eval_rational(&t);
    let rhs = (&t * yn.eval_rational(&t).square())
        - Rational::from(4)
            * (d2.eval_rational(&t) * yn.eval_rational(&t) - d1.eval_rational(&t).square());
    if lhs != rhs {
        return Err(Error::Cache(
            "cached VY family fails the recursion at t = 3".into(),
        ));
    }
    Ok(())
}

/// Compare a cached monic D_n against fresh discriminant values at two fresh
/// nodes (ratio test, since the raw discriminant is a scalar multiple).
fn verify_disc_at_node(n: usize, cached: &ExactPoly) -> Result<()> {
    use crate::exact::{char_poly_at, discriminant_of};
    let deg = n * (n + 1) / 2;
    if cached.degree() != deg {
        return Err(Error::Cache(format!(
            "cached D_{n} has degree {} instead of {deg}",
            cached.degree()
        )));
    }
    let t1 = Rational::from(deg as i64 + 1);
    let t2 = Rational::from(-(deg as i64 + 1));
    let raw1 = discriminant_of(&char_poly_at(n, &t1).poly_in_lambda);
    let raw2 = discriminant_of(&char_poly_at(n, &t2).poly_in_lambda);
    let c1 = cached.eval_rational(&t1);
    let c2 = cached.eval_rational(&t2);
    // raw = const · cached as polynomials ⇔ cross-products match at two
    // fresh nodes (the const is nonzero since raw has the same degree).
    if Rational::from(&raw1 * &c2) != Rational::from(&raw2 * &c1) {
        return Err(Error::Cache(format!(
            "cached D_{n} disagrees with a fresh discriminant evaluation"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_reverify() {
        let dir = tempfile::tempdir().unwrap();
        let cache = PolyCache::new(dir.path()).unwrap();
        let family = cache.vy_family(5).unwrap();
        assert_eq!(family.len(), 6);
        // Second call loads from disk and re-verifies.
        let again = cache.vy_family(5).unwrap();
        assert_eq!(family, again);
        let d3 = cache.disc_poly(3).unwrap();
        let d3_again = cache.disc_poly(3).unwrap();
        assert_eq!(d3, d3_again);
        assert_eq!(d3.degree(), 6);
    }

    #[test]
    fn corrupted_cache_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let cache = PolyCache::new(dir.path()).unwrap();
        let d2 = cache.disc_poly(2).unwrap();
        // Tamper: store a wrong polynomial under the DISC/2 key.
        let bogus = ExactPoly::from_i64(&[1, 0, 0, 1]);
        cache.store(Family::Disc, 2, &bogus).unwrap();
        match cache.disc_poly(2) {
            Err(Error::Cache(_)) => {}
            other => panic!("expected cache error, got {other:?}"),
        }
        let _ = d2;
    }
}
