//! Occupation-number configurations, particle-number sectors and sparse
//! many-body vectors.
//!
//! Sites are 1-based in every public API that takes a *site* (`occ`,
//! `raise`, `lower`, dipole moments). Raw slot access through [`Config::get`]
//! and [`Config::set`] is 0-based.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Most sites a [`Config`] can hold.
pub const MAX_SITES: usize = 32;
/// Largest occupation of a single site.
pub const MAX_OCCUPATION: u8 = 15;

const NIBBLE: u32 = 4;
const MASK: u128 = 0xF;

/// Boundary condition of the chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Bc {
    #[serde(rename = "obc")]
    Open,
    #[serde(rename = "per")]
    Periodic,
}

impl fmt::Display for Bc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bc::Open => "obc",
            Bc::Periodic => "per",
        })
    }
}

impl FromStr for Bc {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "obc" | "open" => Ok(Bc::Open),
            "per" | "periodic" | "pbc" => Ok(Bc::Periodic),
            _ => Err(Error::Parse {
                input: s.to_string(),
                reason: "expected obc or per".into(),
            }),
        }
    }
}

/// An occupation vector packed into 4-bit slots, site 1 in the most
/// significant slot so that integer order on equal lengths is lexicographic.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Config {
    bits: u128,
    len: u8,
    bc: Bc,
}

impl Config {
    /// The zero-site configuration; the unit of [`Config::concat`].
    pub const EMPTY: Config = Config {
        bits: 0,
        len: 0,
        bc: Bc::Open,
    };

    pub fn new(occupations: &[u8], bc: Bc) -> Result<Self> {
        let mut c = Config::vacuum(occupations.len(), bc)?;
        for (i, &v) in occupations.iter().enumerate() {
            if v > MAX_OCCUPATION {
                return Err(Error::OccupationOverflow {
                    value: v as u32,
                    limit: MAX_OCCUPATION,
                });
            }
            c.set(i, v);
        }
        Ok(c)
    }

    pub fn vacuum(len: usize, bc: Bc) -> Result<Self> {
        if len > MAX_SITES {
            return Err(Error::UnsupportedLength {
                len,
                min: 0,
                max: MAX_SITES,
            });
        }
        Ok(Config {
            bits: 0,
            len: len as u8,
            bc,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn bc(&self) -> Bc {
        self.bc
    }

    pub fn with_bc(mut self, bc: Bc) -> Self {
        self.bc = bc;
        self
    }

    #[inline]
    fn shift(&self, i: usize) -> u32 {
        (self.len as u32 - 1 - i as u32) * NIBBLE
    }

    /// Occupation of slot `i` (0-based).
    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        debug_assert!(i < self.len());
        ((self.bits >> self.shift(i)) & MASK) as u8
    }

    /// Overwrites slot `i` (0-based). `value` must not exceed [`MAX_OCCUPATION`].
    #[inline]
    pub fn set(&mut self, i: usize, value: u8) {
        debug_assert!(i < self.len() && value <= MAX_OCCUPATION);
        let s = self.shift(i);
        self.bits = (self.bits & !(MASK << s)) | ((value as u128) << s);
    }

    /// Occupation of `site` (1-based). Sites outside the open chain read as
    /// empty; periodic chains wrap.
    pub fn occ(&self, site: isize) -> u8 {
        match self.slot(site) {
            Some(i) => self.get(i),
            None => 0,
        }
    }

    /// 0-based slot of a 1-based site, wrapping on periodic chains.
    pub fn slot(&self, site: isize) -> Option<usize> {
        let len = self.len() as isize;
        if len == 0 {
            return None;
        }
        match self.bc {
            Bc::Periodic => Some((site - 1).rem_euclid(len) as usize),
            Bc::Open if (1..=len).contains(&site) => Some((site - 1) as usize),
            Bc::Open => None,
        }
    }

    pub fn occupations(&self) -> Vec<u8> {
        (0..self.len()).map(|i| self.get(i)).collect()
    }

    fn check_site(&self, site: usize) -> Result<usize> {
        if site == 0 || site > self.len() {
            return Err(Error::SiteOutOfRange {
                site,
                len: self.len(),
            });
        }
        Ok(site - 1)
    }

    /// Adds one boson at `site` (1-based).
    pub fn raise(&self, site: usize) -> Result<Config> {
        let i = self.check_site(site)?;
        let v = self.get(i);
        if v == MAX_OCCUPATION {
            return Err(Error::OccupationOverflow {
                value: v as u32 + 1,
                limit: MAX_OCCUPATION,
            });
        }
        let mut c = *self;
        c.set(i, v + 1);
        Ok(c)
    }

    /// Removes one boson at `site` (1-based); `None` when the site is empty.
    pub fn lower(&self, site: usize) -> Result<Option<Config>> {
        let i = self.check_site(site)?;
        let v = self.get(i);
        if v == 0 {
            return Ok(None);
        }
        let mut c = *self;
        c.set(i, v - 1);
        Ok(Some(c))
    }

    pub fn particle_number(&self) -> u32 {
        (0..self.len()).map(|i| self.get(i) as u32).sum()
    }

    /// Σ x·μ_x over 1-based sites.
    pub fn dipole(&self) -> u64 {
        (0..self.len())
            .map(|i| (i as u64 + 1) * self.get(i) as u64)
            .sum()
    }

    /// Dipole moment modulo the chain length, the conserved quantity on a ring.
    pub fn dipole_mod(&self) -> u64 {
        if self.is_empty() {
            0
        } else {
            self.dipole() % self.len() as u64
        }
    }

    pub fn max_occupation(&self) -> u8 {
        (0..self.len()).map(|i| self.get(i)).max().unwrap_or(0)
    }

    /// Juxtaposes two chains; the result takes the boundary condition of `self`
    /// unless `self` is empty.
    pub fn concat(&self, other: &Config) -> Result<Config> {
        let len = self.len() + other.len();
        if len > MAX_SITES {
            return Err(Error::UnsupportedLength {
                len,
                min: 0,
                max: MAX_SITES,
            });
        }
        let bc = if self.is_empty() { other.bc } else { self.bc };
        Ok(Config {
            bits: (self.bits << (NIBBLE * other.len() as u32)) | other.bits,
            len: len as u8,
            bc,
        })
    }

    /// The open sub-chain of `len` slots starting at slot `start` (0-based).
    pub fn window(&self, start: usize, len: usize) -> Config {
        debug_assert!(start + len <= self.len());
        let mut c = Config::vacuum(len, Bc::Open).expect("window fits");
        for j in 0..len {
            c.set(j, self.get(start + j));
        }
        c
    }

    pub fn reversed(&self) -> Config {
        let mut c = *self;
        let n = self.len();
        for i in 0..n {
            c.set(i, self.get(n - 1 - i));
        }
        c
    }

    /// Packed representation; equal-length configurations order like their
    /// occupation vectors.
    pub fn bits(&self) -> u128 {
        self.bits
    }

    pub fn observables(&self) -> Observables {
        Observables {
            particles: self.particle_number(),
            dipole: self.dipole(),
            dipole_mod: (self.bc == Bc::Periodic).then(|| self.dipole_mod()),
        }
    }

    /// Occupation string without the boundary suffix. Multi-digit
    /// occupations switch to the comma form; a lone site gets a trailing
    /// comma so that `10,` is not read back as two sites.
    pub fn occupation_string(&self) -> String {
        let occ = self.occupations();
        if occ.iter().all(|&v| v <= 9) {
            occ.iter().map(|v| char::from(b'0' + v)).collect()
        } else if occ.len() == 1 {
            format!("{},", occ[0])
        } else {
            occ.iter()
                .map(u8::to_string)
                .collect::<Vec<_>>()
                .join(",")
        }
    }
}

impl PartialOrd for Config {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Config {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.len, self.bits, self.bc).cmp(&(other.len, other.bits, other.bc))
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.occupation_string(), self.bc)
    }
}

impl fmt::Debug for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Config {
    type Err = Error;

    /// Accepts `20100`, `2,0,1,0,0`, either with an optional `:obc`/`:per`
    /// suffix; the default boundary condition is open.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let (body, bc) = match s.rsplit_once(':') {
            Some((body, suffix)) => (body, suffix.parse::<Bc>()?),
            None => (s, Bc::Open),
        };
        let body = body.trim();
        let occ: Vec<u8> = if body.contains(',') {
            body.strip_suffix(',')
                .unwrap_or(body)
                .split(',')
                .map(|t| t.trim().parse::<u8>().map_err(|_| bad("bad occupation")))
                .collect::<Result<_>>()?
        } else {
            body.chars()
                .map(|ch| {
                    ch.to_digit(10)
                        .map(|d| d as u8)
                        .ok_or_else(|| bad("expected digits"))
                })
                .collect::<Result<_>>()?
        };
        Config::new(&occ, bc)
    }
}

impl Serialize for Config {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Config {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Conserved quantities of a configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Observables {
    pub particles: u32,
    pub dipole: u64,
    pub dipole_mod: Option<u64>,
}

/// Result of a ladder operator: target configuration and matrix element.
pub type Ladder = Option<(Config, f64)>;

/// a†_site |μ⟩ = √(μ_site+1) |μ + e_site⟩.
pub fn create(c: &Config, site: usize) -> Result<Ladder> {
    let i = c.check_site(site)?;
    let v = c.get(i);
    let next = c.raise(site)?;
    Ok(Some((next, ((v as f64) + 1.0).sqrt())))
}

/// a_site |μ⟩ = √μ_site |μ − e_site⟩, or `None` on an empty site.
pub fn annihilate(c: &Config, site: usize) -> Result<Ladder> {
    let i = c.check_site(site)?;
    let v = c.get(i);
    Ok(c.lower(site)?.map(|next| (next, (v as f64).sqrt())))
}

/// Fixed (length, particle number, occupation cap, boundary) block of Fock space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sector {
    pub len: usize,
    pub particles: u32,
    pub n_max: u8,
    pub bc: Bc,
}

impl Sector {
    pub fn new(len: usize, particles: u32, n_max: u8, bc: Bc) -> Result<Self> {
        if len == 0 || len > MAX_SITES {
            return Err(Error::UnsupportedLength {
                len,
                min: 1,
                max: MAX_SITES,
            });
        }
        if n_max > MAX_OCCUPATION {
            return Err(Error::OccupationOverflow {
                value: n_max as u32,
                limit: MAX_OCCUPATION,
            });
        }
        Ok(Sector {
            len,
            particles,
            n_max,
            bc,
        })
    }

    /// Number of configurations in the sector.
    pub fn size(&self) -> u64 {
        placements(self.len, self.particles, self.n_max)
    }

    /// All configurations in lexicographic order.
    pub fn configs(&self) -> Vec<Config> {
        let mut out = Vec::with_capacity(self.size() as usize);
        let mut cur = Config::vacuum(self.len, self.bc).expect("validated length");
        fill_configs(&mut cur, 0, self.particles, self.n_max, &mut out);
        out
    }

    /// Lexicographic rank of `c`, or `None` if it is not in the sector.
    pub fn rank(&self, c: &Config) -> Option<u64> {
        if c.len() != self.len
            || c.bc() != self.bc
            || c.particle_number() != self.particles
            || c.max_occupation() > self.n_max
        {
            return None;
        }
        let mut rank = 0;
        let mut left = self.particles;
        for i in 0..self.len {
            let v = c.get(i) as u32;
            let rest = self.len - i - 1;
            for smaller in 0..v {
                rank += placements(rest, left - smaller, self.n_max);
            }
            left -= v;
        }
        Some(rank)
    }

    /// Inverse of [`Sector::rank`].
    pub fn unrank(&self, mut rank: u64) -> Option<Config> {
        if rank >= self.size() {
            return None;
        }
        let mut c = Config::vacuum(self.len, self.bc).ok()?;
        let mut left = self.particles;
        for i in 0..self.len {
            let rest = self.len - i - 1;
            let mut v = 0u32;
            loop {
                let count = placements(rest, left - v, self.n_max);
                if rank < count {
                    break;
                }
                rank -= count;
                v += 1;
            }
            c.set(i, v as u8);
            left -= v;
        }
        Some(c)
    }
}

/// Ways to put `particles` bosons on `sites` sites with at most `cap` per site.
pub fn placements(sites: usize, particles: u32, cap: u8) -> u64 {
    let n = particles as usize;
    let cap = cap as usize;
    let mut ways = vec![0u64; n + 1];
    ways[0] = 1;
    for _ in 0..sites {
        let mut next = vec![0u64; n + 1];
        for (have, &w) in ways.iter().enumerate() {
            if w == 0 {
                continue;
            }
            for add in 0..=cap.min(n - have) {
                next[have + add] += w;
            }
        }
        ways = next;
    }
    ways[n]
}

fn fill_configs(cur: &mut Config, i: usize, left: u32, cap: u8, out: &mut Vec<Config>) {
    let len = cur.len();
    if i == len {
        if left == 0 {
            out.push(*cur);
        }
        return;
    }
    let room_after = (len - i - 1) as u32 * cap as u32;
    let lo = left.saturating_sub(room_after);
    let hi = left.min(cap as u32);
    for v in lo..=hi {
        cur.set(i, v as u8);
        fill_configs(cur, i + 1, left - v, cap, out);
    }
    cur.set(i, 0);
}

/// Lexicographically ordered configurations of a sector.
pub fn enumerate_configs(len: usize, particles: u32, n_max: u8, bc: Bc) -> Result<Vec<Config>> {
    Ok(Sector::new(len, particles, n_max, bc)?.configs())
}

/// A finitely supported vector over configurations of one chain.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseState {
    len: usize,
    bc: Bc,
    amps: BTreeMap<Config, Complex64>,
}

impl SparseState {
    pub fn zero(len: usize, bc: Bc) -> Self {
        SparseState {
            len,
            bc,
            amps: BTreeMap::new(),
        }
    }

    pub fn basis(c: Config) -> Self {
        let mut s = SparseState::zero(c.len(), c.bc());
        s.amps.insert(c, Complex64::new(1.0, 0.0));
        s
    }

    /// Amplitude `amp` on the zero-site chain.
    pub fn scalar(amp: Complex64) -> Self {
        let mut s = SparseState::zero(0, Bc::Open);
        if amp != Complex64::new(0.0, 0.0) {
            s.amps.insert(Config::EMPTY, amp);
        }
        s
    }

    pub fn from_terms<I>(len: usize, bc: Bc, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Config, Complex64)>,
    {
        let mut s = SparseState::zero(len, bc);
        for (c, a) in terms {
            s.add_term(c, a)?;
        }
        Ok(s)
    }

    /// Chain length, not the number of terms.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn bc(&self) -> Bc {
        self.bc
    }

    pub fn num_terms(&self) -> usize {
        self.amps.len()
    }

    pub fn is_zero(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitude(&self, c: &Config) -> Complex64 {
        self.amps.get(c).copied().unwrap_or_default()
    }

    /// Terms in lexicographic order of configuration.
    pub fn iter(&self) -> impl Iterator<Item = (&Config, &Complex64)> {
        self.amps.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Config> {
        self.amps.keys()
    }

    fn check_shape(&self, c: &Config) -> Result<()> {
        if c.len() != self.len || c.bc() != self.bc {
            return Err(Error::ShapeMismatch {
                left: format!("{} sites {}", self.len, self.bc),
                right: c.to_string(),
            });
        }
        Ok(())
    }

    fn check_same(&self, other: &SparseState) -> Result<()> {
        if self.len != other.len || self.bc != other.bc {
            return Err(Error::ShapeMismatch {
                left: format!("{} sites {}", self.len, self.bc),
                right: format!("{} sites {}", other.len, other.bc),
            });
        }
        Ok(())
    }

    /// Adds `amp` to the amplitude of `c`; entries that cancel exactly are removed.
    pub fn add_term(&mut self, c: Config, amp: Complex64) -> Result<()> {
        self.check_shape(&c)?;
        self.add_unchecked(c, amp);
        Ok(())
    }

    pub(crate) fn add_unchecked(&mut self, c: Config, amp: Complex64) {
        if amp == Complex64::new(0.0, 0.0) {
            return;
        }
        let slot = self.amps.entry(c).or_default();
        *slot += amp;
        if *slot == Complex64::new(0.0, 0.0) {
            self.amps.remove(&c);
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// ⟨self|other⟩, antilinear in `self`.
    pub fn inner(&self, other: &SparseState) -> Result<Complex64> {
        self.check_same(other)?;
        let (small, large, flip) = if self.amps.len() <= other.amps.len() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, a) in &small.amps {
            if let Some(b) = large.amps.get(c) {
                acc += if flip { b.conj() * a } else { a.conj() * b };
            }
        }
        Ok(acc)
    }

    pub fn scale(&mut self, factor: Complex64) {
        if factor == Complex64::new(0.0, 0.0) {
            self.amps.clear();
            return;
        }
        for a in self.amps.values_mut() {
            *a *= factor;
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut s = self.clone();
        s.scale(factor);
        s
    }

    /// self += factor · other.
    pub fn axpy(&mut self, factor: Complex64, other: &SparseState) -> Result<()> {
        self.check_same(other)?;
        for (c, a) in &other.amps {
            self.add_unchecked(*c, factor * a);
        }
        Ok(())
    }

    /// ‖self − other‖.
    pub fn distance(&self, other: &SparseState) -> Result<f64> {
        let mut d = self.clone();
        d.axpy(Complex64::new(-1.0, 0.0), other)?;
        Ok(d.norm())
    }

    /// |self⟩ ⊗ |other⟩ on the juxtaposed open chain.
    pub fn tensor(&self, other: &SparseState) -> Result<SparseState> {
        let len = self.len + other.len;
        let bc = if self.len == 0 { other.bc } else { self.bc };
        let mut out = SparseState::zero(len, bc);
        for (c, a) in &self.amps {
            for (d, b) in &other.amps {
                out.add_unchecked(c.concat(d)?, a * b);
            }
        }
        Ok(out)
    }

    /// Drops every amplitude with magnitude at most `tol`.
    pub fn prune(&mut self, tol: f64) {
        self.amps.retain(|_, a| a.norm() > tol);
    }

    pub fn normalized(&self) -> Result<SparseState> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    /// Relabels every configuration with boundary condition `bc`.
    pub fn with_bc(self, bc: Bc) -> SparseState {
        SparseState {
            len: self.len,
            bc,
            amps: self
                .amps
                .into_iter()
                .map(|(c, a)| (c.with_bc(bc), a))
                .collect(),
        }
    }

    /// Dense coordinates on `basis`; fails if the support leaves the basis.
    pub fn to_dense(&self, basis: &[Config]) -> Result<Vec<Complex64>> {
        let index: std::collections::HashMap<Config, usize> =
            basis.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        let mut v = vec![Complex64::new(0.0, 0.0); basis.len()];
        for (c, a) in &self.amps {
            match index.get(c) {
                Some(&i) => v[i] = *a,
                None => {
                    return Err(Error::InvalidParameter(format!(
                        "{c} lies outside the requested basis"
                    )))
                }
            }
        }
        Ok(v)
    }

    /// Inverse of [`SparseState::to_dense`]; exact zeros are dropped.
    pub fn from_dense(basis: &[Config], v: &[Complex64]) -> Result<SparseState> {
        let first = basis.first().ok_or(Error::ZeroVector)?;
        SparseState::from_terms(
            first.len(),
            first.bc(),
            basis.iter().copied().zip(v.iter().copied()),
        )
    }
}

#[derive(Serialize)]
struct Term {
    config: String,
    re: f64,
    im: f64,
}

impl Serialize for SparseState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let terms: Vec<Term> = self
            .amps
            .iter()
            .map(|(c, a)| Term {
                config: c.to_string(),
                re: a.re,
                im: a.im,
            })
            .collect();
        let mut st = s.serialize_struct("SparseState", 4)?;
        st.serialize_field("schema", &1)?;
        st.serialize_field("len", &self.len)?;
        st.serialize_field("bc", &self.bc)?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}
