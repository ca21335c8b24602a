//! Tiles, tilings, root enumeration, rewrite-rule closure and recognition
//! of tiling configurations.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fock::{Bc, Config, MAX_OCCUPATION, MAX_SITES};

/// A single tile. Parameterised kinds carry the boundary occupation `n ≥ 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tile {
    /// (0)
    Void,
    /// (10)
    Monomer,
    /// (1), a monomer cut by the right end.
    EndMonomer,
    /// (0200)
    Dimer,
    /// (020), a dimer cut by the right end.
    EndDimer,
    /// (n00)
    LeftBoundary(u8),
    /// (0n)
    RightBoundary(u8),
    /// (n010)
    LeftEdge(u8),
    /// ((n−1)200)
    LeftEdgeHopped(u8),
    /// (n00200)
    LeftEdgeDimer(u8),
    /// (10n)
    RightEdge(u8),
    /// (02(n−1))
    RightEdgeHopped(u8),
    /// (0200n)
    RightEdgeDimer(u8),
    /// (01)
    Flipped,
    /// (01200)
    ExcitedLeft,
    /// (02100)
    ExcitedRight,
}

impl Tile {
    pub fn pattern(&self) -> Vec<u8> {
        use Tile::*;
        match *self {
            Void => vec![0],
            Monomer => vec![1, 0],
            EndMonomer => vec![1],
            Dimer => vec![0, 2, 0, 0],
            EndDimer => vec![0, 2, 0],
            LeftBoundary(n) => vec![n, 0, 0],
            RightBoundary(n) => vec![0, n],
            LeftEdge(n) => vec![n, 0, 1, 0],
            LeftEdgeHopped(n) => vec![n - 1, 2, 0, 0],
            LeftEdgeDimer(n) => vec![n, 0, 0, 2, 0, 0],
            RightEdge(n) => vec![1, 0, n],
            RightEdgeHopped(n) => vec![0, 2, n - 1],
            RightEdgeDimer(n) => vec![0, 2, 0, 0, n],
            Flipped => vec![0, 1],
            ExcitedLeft => vec![0, 1, 2, 0, 0],
            ExcitedRight => vec![0, 2, 1, 0, 0],
        }
    }

    pub fn len(&self) -> usize {
        self.pattern().len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// True for the tiles that carry the dimer weight.
    pub fn is_dimer(&self) -> bool {
        matches!(self, Tile::Dimer | Tile::EndDimer)
    }

    /// Tiles that may only open an open chain.
    pub fn is_left_boundary(&self) -> bool {
        use Tile::*;
        matches!(self, LeftBoundary(_) | LeftEdge(_) | LeftEdgeHopped(_) | LeftEdgeDimer(_))
    }

    /// Tiles that may only close an open chain.
    pub fn is_right_boundary(&self) -> bool {
        use Tile::*;
        matches!(
            self,
            EndMonomer
                | EndDimer
                | RightBoundary(_)
                | RightEdge(_)
                | RightEdgeHopped(_)
                | RightEdgeDimer(_)
        )
    }

    /// Inverse of [`Tile::pattern`].
    pub fn from_pattern(p: &[u8]) -> Option<Tile> {
        use Tile::*;
        let big = |n: u8| (2..=MAX_OCCUPATION).contains(&n);
        Some(match *p {
            [0] => Void,
            [1, 0] => Monomer,
            [1] => EndMonomer,
            [0, 2, 0, 0] => Dimer,
            [0, 2, 0] => EndDimer,
            [0, 1] => Flipped,
            [0, 1, 2, 0, 0] => ExcitedLeft,
            [0, 2, 1, 0, 0] => ExcitedRight,
            [n, 0, 0] if big(n) => LeftBoundary(n),
            [0, n] if big(n) => RightBoundary(n),
            [n, 0, 1, 0] if big(n) => LeftEdge(n),
            [m, 2, 0, 0] if m >= 1 && big(m + 1) => LeftEdgeHopped(m + 1),
            [n, 0, 0, 2, 0, 0] if big(n) => LeftEdgeDimer(n),
            [1, 0, n] if big(n) => RightEdge(n),
            [0, 2, m] if m >= 1 && big(m + 1) => RightEdgeHopped(m + 1),
            [0, 2, 0, 0, n] if big(n) => RightEdgeDimer(n),
            _ => return None,
        })
    }
}

fn pattern_text(p: &[u8]) -> String {
    if p.iter().all(|&v| v <= 9) {
        p.iter().map(|v| char::from(b'0' + v)).collect()
    } else {
        p.iter().map(u8::to_string).collect::<Vec<_>>().join(",")
    }
}

impl fmt::Display for Tile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", pattern_text(&self.pattern()))
    }
}

/// An ordered cover of a chain by tiles. Periodic tilings start with the
/// tile covering site 1, which begins at slot `offset` (0-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tiling {
    tiles: Vec<Tile>,
    len: usize,
    bc: Bc,
    offset: usize,
}

impl Tiling {
    /// An open-chain tiling; boundary kinds must sit at the ends.
    pub fn open(tiles: Vec<Tile>) -> Result<Self> {
        let len: usize = tiles.iter().map(Tile::len).sum();
        if len > MAX_SITES {
            return Err(Error::UnsupportedLength {
                len,
                min: 0,
                max: MAX_SITES,
            });
        }
        let last = tiles.len().saturating_sub(1);
        for (i, t) in tiles.iter().enumerate() {
            if t.is_left_boundary() && i != 0 {
                return Err(Error::InvalidTiling(format!("{t} must be the first tile")));
            }
            if t.is_right_boundary() && i != last {
                return Err(Error::InvalidTiling(format!("{t} must be the last tile")));
            }
        }
        Ok(Tiling {
            tiles,
            len,
            bc: Bc::Open,
            offset: 0,
        })
    }

    /// A ring tiling whose first tile starts at slot `offset`; the result is
    /// rotated so that its first tile covers site 1.
    pub fn periodic(tiles: Vec<Tile>, offset: usize) -> Result<Self> {
        let len: usize = tiles.iter().map(Tile::len).sum();
        if len == 0 || len > MAX_SITES {
            return Err(Error::UnsupportedLength {
                len,
                min: 1,
                max: MAX_SITES,
            });
        }
        if let Some(t) = tiles
            .iter()
            .find(|t| !matches!(t, Tile::Void | Tile::Monomer | Tile::Dimer))
        {
            return Err(Error::InvalidTiling(format!("{t} cannot tile a ring")));
        }
        Ok(canonical_ring(tiles, offset % len, len))
    }

    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bc(&self) -> Bc {
        self.bc
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    /// Number of D and D1 tiles.
    pub fn dimer_count(&self) -> usize {
        self.tiles.iter().filter(|t| t.is_dimer()).count()
    }

    /// σ(T): the occupation vector obtained by laying the patterns down.
    pub fn to_config(&self) -> Config {
        let mut c = Config::vacuum(self.len, self.bc).expect("length checked on construction");
        let mut pos = self.offset;
        for t in &self.tiles {
            for v in t.pattern() {
                c.set(pos % self.len, v);
                pos += 1;
            }
        }
        c
    }
}

fn canonical_ring(tiles: Vec<Tile>, offset: usize, len: usize) -> Tiling {
    let mut start = offset;
    let mut first = 0;
    for (i, t) in tiles.iter().enumerate() {
        let s = start % len;
        let covers_origin = s == 0 || s + t.len() > len;
        if covers_origin {
            first = i;
            break;
        }
        start += t.len();
    }
    let mut rotated = tiles[first..].to_vec();
    rotated.extend_from_slice(&tiles[..first]);
    Tiling {
        tiles: rotated,
        len,
        bc: Bc::Periodic,
        offset: start % len,
    }
}

impl fmt::Display for Tiling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.tiles {
            write!(f, "{t}")?;
        }
        if self.bc == Bc::Periodic {
            write!(f, "@{}", self.offset)?;
        }
        Ok(())
    }
}

impl FromStr for Tiling {
    type Err = Error;

    /// `(10)(0200)(1)` for open chains, `(10)(0200)@k` for rings whose first
    /// tile starts at slot `k`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let (body, ring) = match s.split_once('@') {
            Some((b, off)) => (b, Some(off.trim().parse::<usize>().map_err(|_| bad("offset"))?)),
            None => (s, None),
        };
        let mut tiles = Vec::new();
        let mut rest = body.trim();
        while !rest.is_empty() {
            let inner = rest.strip_prefix('(').ok_or_else(|| bad("expected '('"))?;
            let close = inner.find(')').ok_or_else(|| bad("unclosed '('"))?;
            let text = &inner[..close];
            let pattern: Vec<u8> = if text.contains(',') {
                text.split(',')
                    .map(|t| t.trim().parse().map_err(|_| bad("bad occupation")))
                    .collect::<Result<_>>()?
            } else {
                text.chars()
                    .map(|ch| ch.to_digit(10).map(|d| d as u8).ok_or_else(|| bad("bad digit")))
                    .collect::<Result<_>>()?
            };
            tiles.push(Tile::from_pattern(&pattern).ok_or_else(|| bad("unknown tile"))?);
            rest = inner[close + 1..].trim_start();
        }
        match ring {
            Some(off) => Tiling::periodic(tiles, off),
            None => Tiling::open(tiles),
        }
    }
}

impl Serialize for Tiling {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Tiling", 5)?;
        st.serialize_field("tiles", &self.tiles.iter().map(Tile::to_string).collect::<Vec<_>>())?;
        st.serialize_field("config", &self.to_config().to_string())?;
        st.serialize_field("d", &self.dimer_count())?;
        st.serialize_field("bc", &self.bc)?;
        st.serialize_field("offset", &self.offset)?;
        st.end()
    }
}

/// A family of tilings: its admissible roots and its rewrite rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Every open-chain BVMD tiling, boundary occupations up to `n_cap`.
    ObcAll { n_cap: u8 },
    /// Open-chain tilings whose boundary tiles carry at most two bosons.
    ObcBulk,
    /// Ring tilings by voids, monomers and dimers.
    Periodic,
    /// Open-chain tilings with at least one edge tile, occupations up to `n_cap`.
    Edge { n_cap: u8 },
    /// The single excited root (10)_l (01)_m (10)_r.
    Excited { left: usize, gap: usize, right: usize },
}

impl Family {
    pub fn bc(&self) -> Bc {
        match self {
            Family::Periodic => Bc::Periodic,
            _ => Bc::Open,
        }
    }

    fn rules(&self) -> &'static [Rule] {
        use Rule::*;
        match self {
            Family::ObcAll { .. } | Family::ObcBulk | Family::Periodic => &[MonomerPair, EndPair],
            Family::Edge { .. } => &[MonomerPair, EndPair, LeftEdgeHop, LeftEdgeDimer, RightEdgeHop, RightEdgeDimer],
            Family::Excited { .. } => &[MonomerPair, EndPair, ExcitedLeft, ExcitedRight],
        }
    }

    /// Chain length of the family's members when it is fixed by the family.
    pub fn fixed_len(&self) -> Option<usize> {
        match *self {
            Family::Excited { left, gap, right } => Some(2 * (left + gap + right)),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::ObcAll { n_cap } => write!(f, "obc-all(n_cap={n_cap})"),
            Family::ObcBulk => write!(f, "obc-bulk"),
            Family::Periodic => write!(f, "per"),
            Family::Edge { n_cap } => write!(f, "edge(n_cap={n_cap})"),
            Family::Excited { left, gap, right } => write!(f, "excited(l={left},m={gap},r={right})"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    /// `per`, `obc-bulk`, `obc-all[:n_cap]`, `edge[:n_cap]` or
    /// `excited:l,m,r`; the `Display` form is accepted as well. The default
    /// cap is 4.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let s = s.trim();
        let (name, args) = match s.split_once([':', '(']) {
            Some((n, a)) => (n, a.trim_end_matches(')')),
            None => (s, ""),
        };
        let numbers: Vec<usize> = args
            .split(',')
            .map(|a| a.rsplit('=').next().unwrap_or("").trim())
            .filter(|a| !a.is_empty())
            .map(|a| a.parse::<usize>().map_err(|_| bad("expected integer arguments")))
            .collect::<Result<_>>()?;
        let cap = || -> Result<u8> {
            match numbers.as_slice() {
                [] => Ok(4),
                [n] if *n <= MAX_OCCUPATION as usize => Ok(*n as u8),
                _ => Err(bad("expected a single occupation cap")),
            }
        };
        let plain = |f: Family| if numbers.is_empty() { Ok(f) } else { Err(bad("takes no arguments")) };
        match name.to_ascii_lowercase().as_str() {
            "per" | "periodic" => plain(Family::Periodic),
            "obc-bulk" | "bulk" => plain(Family::ObcBulk),
            "obc-all" | "obc" => Ok(Family::ObcAll { n_cap: cap()? }),
            "edge" => Ok(Family::Edge { n_cap: cap()? }),
            "excited" => match numbers.as_slice() {
                [l, m, r] => Ok(Family::Excited { left: *l, gap: *m, right: *r }),
                _ => Err(bad("expected excited:l,m,r")),
            },
            _ => Err(bad("unknown family")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Rule {
    /// (10)(10) ↔ (0200)
    MonomerPair,
    /// (10)(1) ↔ (020)
    EndPair,
    /// (n010) ↔ ((n−1)200)
    LeftEdgeHop,
    /// (n010)(10) ↔ (n00200)
    LeftEdgeDimer,
    /// (10n) ↔ (02(n−1))
    RightEdgeHop,
    /// (10)(10n) ↔ (0200n)
    RightEdgeDimer,
    /// (020)(10) ↔ (01200)
    ExcitedLeft,
    /// (1)(0200) ↔ (02100)
    ExcitedRight,
}

impl Rule {
    /// Rewrites the window starting at `w[0]`: returns how many tiles are
    /// consumed and their replacement.
    fn apply(self, w: &[Tile]) -> Option<(usize, Vec<Tile>)> {
        use Tile::*;
        let first = *w.first()?;
        let second = w.get(1).copied();
        match (self, first, second) {
            (Rule::MonomerPair, Monomer, Some(Monomer)) => Some((2, vec![Dimer])),
            (Rule::MonomerPair, Dimer, _) => Some((1, vec![Monomer, Monomer])),
            (Rule::EndPair, Monomer, Some(EndMonomer)) => Some((2, vec![EndDimer])),
            (Rule::EndPair, EndDimer, _) => Some((1, vec![Monomer, EndMonomer])),
            (Rule::LeftEdgeHop, LeftEdge(n), _) => Some((1, vec![LeftEdgeHopped(n)])),
            (Rule::LeftEdgeHop, LeftEdgeHopped(n), _) => Some((1, vec![LeftEdge(n)])),
            (Rule::LeftEdgeDimer, LeftEdge(n), Some(Monomer)) => Some((2, vec![LeftEdgeDimer(n)])),
            (Rule::LeftEdgeDimer, LeftEdgeDimer(n), _) => Some((1, vec![LeftEdge(n), Monomer])),
            (Rule::RightEdgeHop, RightEdge(n), _) => Some((1, vec![RightEdgeHopped(n)])),
            (Rule::RightEdgeHop, RightEdgeHopped(n), _) => Some((1, vec![RightEdge(n)])),
            (Rule::RightEdgeDimer, Monomer, Some(RightEdge(n))) => Some((2, vec![RightEdgeDimer(n)])),
            (Rule::RightEdgeDimer, RightEdgeDimer(n), _) => Some((1, vec![Monomer, RightEdge(n)])),
            (Rule::ExcitedLeft, EndDimer, Some(Monomer)) => Some((2, vec![ExcitedLeft])),
            (Rule::ExcitedLeft, ExcitedLeft, _) => Some((1, vec![EndDimer, Monomer])),
            (Rule::ExcitedRight, EndMonomer, Some(Dimer)) => Some((2, vec![ExcitedRight])),
            (Rule::ExcitedRight, ExcitedRight, _) => Some((1, vec![EndMonomer, Dimer])),
            _ => None,
        }
    }
}

/// All one-step rewrites of `t` under `rules`.
fn rewrites(t: &Tiling, rules: &[Rule]) -> Vec<Tiling> {
    let k = t.tiles.len();
    let mut out = Vec::new();
    match t.bc {
        Bc::Open => {
            for i in 0..k {
                for rule in rules {
                    if let Some((used, repl)) = rule.apply(&t.tiles[i..]) {
                        let mut tiles = t.tiles[..i].to_vec();
                        tiles.extend(repl);
                        tiles.extend_from_slice(&t.tiles[i + used..]);
                        out.push(Tiling { tiles, ..t.clone() });
                    }
                }
            }
        }
        Bc::Periodic => {
            let mut start = t.offset;
            for i in 0..k {
                let mut cyc = t.tiles[i..].to_vec();
                cyc.extend_from_slice(&t.tiles[..i]);
                for rule in rules {
                    if let Some((used, repl)) = rule.apply(&cyc) {
                        if used > k {
                            continue;
                        }
                        let mut tiles = repl;
                        tiles.extend_from_slice(&cyc[used..]);
                        out.push(canonical_ring(tiles, start % t.len, t.len));
                    }
                }
                start += t.tiles[i].len();
            }
        }
    }
    out
}

fn monomer_void_covers(len: usize) -> Vec<Vec<Tile>> {
    let mut table: Vec<Vec<Vec<Tile>>> = vec![vec![vec![]]];
    for n in 1..=len {
        let mut here: Vec<Vec<Tile>> = table[n - 1]
            .iter()
            .map(|s| {
                let mut v = s.clone();
                v.push(Tile::Void);
                v
            })
            .collect();
        if n >= 2 {
            here.extend(table[n - 2].iter().map(|s| {
                let mut v = s.clone();
                v.push(Tile::Monomer);
                v
            }));
        }
        table.push(here);
    }
    table.swap_remove(len)
}

fn boundary_roots(len: usize, lefts: &[Tile], rights: &[Tile]) -> Vec<Vec<Tile>> {
    let mut out = Vec::new();
    for l in lefts {
        for r in rights {
            let edge = l.len() + r.len();
            if edge > len {
                continue;
            }
            for mid in monomer_void_covers(len - edge) {
                let mut tiles = vec![*l];
                tiles.extend(mid);
                tiles.push(*r);
                out.push(tiles);
            }
        }
    }
    out
}

/// Root tilings (no dimer-bearing tiles) of the family on `len` sites,
/// sorted by configuration.
pub fn enumerate_roots(len: usize, family: Family) -> Result<Vec<Tiling>> {
    use Tile::*;
    if !(4..=MAX_SITES).contains(&len) {
        return Err(Error::UnsupportedLength {
            len,
            min: 4,
            max: MAX_SITES,
        });
    }
    let cap_range = |n_cap: u8| -> Result<Vec<u8>> {
        if !(2..=MAX_OCCUPATION).contains(&n_cap) {
            return Err(Error::InvalidParameter(format!(
                "occupation cap must lie in 2..={MAX_OCCUPATION}, got {n_cap}"
            )));
        }
        Ok((2..=n_cap).collect())
    };
    let mut roots: Vec<Tiling> = match family {
        Family::ObcBulk => boundary_roots(
            len,
            &[Void, Monomer, LeftBoundary(2)],
            &[Void, Monomer, EndMonomer, RightBoundary(2)],
        )
        .into_iter()
        .map(Tiling::open)
        .collect::<Result<_>>()?,
        Family::ObcAll { n_cap } => {
            let ns = cap_range(n_cap)?;
            let mut lefts = vec![Void, Monomer];
            lefts.extend(ns.iter().map(|&n| LeftBoundary(n)));
            let mut rights = vec![Void, Monomer, EndMonomer];
            rights.extend(ns.iter().map(|&n| RightBoundary(n)));
            boundary_roots(len, &lefts, &rights)
                .into_iter()
                .map(Tiling::open)
                .collect::<Result<_>>()?
        }
        Family::Edge { n_cap } => {
            let ns = cap_range(n_cap)?;
            let mut lefts = vec![Void, Monomer];
            lefts.extend(ns.iter().map(|&n| LeftBoundary(n)));
            let mut rights = vec![Void, Monomer, EndMonomer];
            rights.extend(ns.iter().map(|&n| RightBoundary(n)));
            let left_edges: Vec<Tile> = ns.iter().map(|&n| LeftEdge(n)).collect();
            let right_edges: Vec<Tile> = ns.iter().map(|&n| RightEdge(n)).collect();
            let mut all_left = lefts.clone();
            all_left.extend(&left_edges);
            let mut all_right = rights.clone();
            all_right.extend(&right_edges);
            boundary_roots(len, &all_left, &all_right)
                .into_iter()
                .filter(|t| {
                    matches!(t[0], LeftEdge(_)) || matches!(t[t.len() - 1], RightEdge(_))
                })
                .map(Tiling::open)
                .collect::<Result<_>>()?
        }
        Family::Periodic => {
            let mut out: Vec<Tiling> = monomer_void_covers(len)
                .into_iter()
                .map(|tiles| Tiling::periodic(tiles, 0))
                .collect::<Result<_>>()?;
            for mid in monomer_void_covers(len - 2) {
                let mut tiles = vec![Monomer];
                tiles.extend(mid);
                out.push(Tiling::periodic(tiles, len - 1)?);
            }
            out
        }
        Family::Excited { left, gap, right } => {
            if 2 * (left + gap + right) != len || gap == 0 {
                return Err(Error::InvalidParameter(format!(
                    "excited root ({left},{gap},{right}) does not fit {len} sites"
                )));
            }
            vec![excited_root(left, gap, right)?]
        }
    };
    roots.sort_by_key(Tiling::to_config);
    roots.dedup_by_key(|t| t.to_config());
    Ok(roots)
}

/// (10)_l (0)(10)_{m−1}(1) (10)_r.
pub fn excited_root(left: usize, gap: usize, right: usize) -> Result<Tiling> {
    if gap == 0 {
        return Err(Error::InvalidParameter("excited root needs m ≥ 1".into()));
    }
    let mut tiles = vec![Tile::Monomer; left];
    tiles.push(Tile::Void);
    tiles.extend(std::iter::repeat_n(Tile::Monomer, gap - 1));
    tiles.push(Tile::EndMonomer);
    tiles.extend(std::iter::repeat_n(Tile::Monomer, right));
    let len: usize = tiles.iter().map(Tile::len).sum();
    if len > MAX_SITES {
        return Err(Error::UnsupportedLength {
            len,
            min: 0,
            max: MAX_SITES,
        });
    }
    // The end monomer sits in the bulk here, so bypass the end-placement check.
    Ok(Tiling {
        tiles,
        len,
        bc: Bc::Open,
        offset: 0,
    })
}

/// M_n^{(i)}: n−1 monomers followed by an end monomer (i = 1) or a full
/// monomer (i = 2), on 2(n−1)+i sites.
pub fn monomer_chain(n: usize, kind: u8) -> Result<Tiling> {
    if n == 0 || !(1..=2).contains(&kind) {
        return Err(Error::InvalidParameter(format!("M_{n}^({kind}) is undefined")));
    }
    let mut tiles = vec![Tile::Monomer; n - 1];
    tiles.push(if kind == 1 { Tile::EndMonomer } else { Tile::Monomer });
    Tiling::open(tiles)
}

/// Breadth-first closure of `root` under the family's rewrite rules, sorted
/// by configuration.
pub fn expand_class(root: &Tiling, family: Family) -> Result<Vec<Tiling>> {
    if root.bc != family.bc() {
        return Err(Error::InvalidTiling(format!(
            "{root} does not belong to family {family}"
        )));
    }
    let rules = family.rules();
    let mut seen: HashSet<Config> = HashSet::new();
    let mut queue = VecDeque::new();
    let mut out = Vec::new();
    seen.insert(root.to_config());
    queue.push_back(root.clone());
    while let Some(t) = queue.pop_front() {
        for next in rewrites(&t, rules) {
            if seen.insert(next.to_config()) {
                queue.push_back(next);
            }
        }
        out.push(t);
    }
    out.sort_by_key(Tiling::to_config);
    Ok(out)
}

/// Tilings of every class of the family, keyed by root configuration.
pub fn classes(len: usize, family: Family) -> Result<Vec<(Tiling, Vec<Tiling>)>> {
    enumerate_roots(len, family)?
        .into_iter()
        .map(|r| {
            let class = expand_class(&r, family)?;
            Ok((r, class))
        })
        .collect()
}

/// First violated tiling condition as `(condition, 1-based site)`.
pub fn first_violation(c: &Config) -> Option<(u8, usize)> {
    let len = c.len() as isize;
    let at = |x: isize| c.occ(x);
    let sites = 1..=len;
    let adjacency = |x: isize| at(x) >= 1 && (at(x - 1) > 0 || at(x + 1) > 0);
    let spacing = |x: isize| {
        at(x) >= 2 && (at(x - 2) > 0 || at(x + 2) > 0 || at(x - 3) > 1 || at(x + 3) > 1)
    };
    match c.bc() {
        Bc::Open => {
            let overfull = |x: isize| at(x) >= 3 && x != 1 && x != len;
            let checks: [(u8, &dyn Fn(isize) -> bool); 3] =
                [(1, &overfull), (2, &adjacency), (3, &spacing)];
            for (cond, test) in checks {
                if let Some(x) = sites.clone().find(|&x| test(x)) {
                    return Some((cond, x as usize));
                }
            }
        }
        Bc::Periodic => {
            let dimer = |x: isize| at(x) >= 3 || spacing(x);
            let checks: [(u8, &dyn Fn(isize) -> bool); 2] = [(1, &adjacency), (2, &dimer)];
            for (cond, test) in checks {
                if let Some(x) = sites.clone().find(|&x| test(x)) {
                    return Some((cond, x as usize));
                }
            }
        }
    }
    None
}

/// Whether `c` is the configuration of some tiling (open chains: any
/// boundary occupation).
pub fn is_tiling(c: &Config) -> Result<bool> {
    if c.len() < 4 {
        return Err(Error::UnsupportedLength {
            len: c.len(),
            min: 4,
            max: MAX_SITES,
        });
    }
    Ok(first_violation(c).is_none())
}

/// The unique tiling with configuration `c`, placed boundary tiles first,
/// then dimers, monomers and voids.
pub fn recognize(c: &Config) -> Result<Tiling> {
    let len = c.len();
    if len < 4 {
        return Err(Error::UnsupportedLength {
            len,
            min: 4,
            max: MAX_SITES,
        });
    }
    if let Some((condition, site)) = first_violation(c) {
        return Err(Error::NotTiling {
            config: *c,
            condition,
            site,
        });
    }
    let mut placed: HashMap<usize, Tile> = HashMap::new();
    let mut covered = vec![false; len];
    let mut place = |start: usize, tile: Tile, covered: &mut Vec<bool>| -> Result<()> {
        for j in 0..tile.len() {
            let s = (start + j) % len;
            if covered[s] {
                return Err(Error::InvalidTiling(format!("overlapping placement in {c}")));
            }
            covered[s] = true;
        }
        placed.insert(start, tile);
        Ok(())
    };
    let open = c.bc() == Bc::Open;
    if open {
        if c.get(0) >= 2 {
            place(0, Tile::LeftBoundary(c.get(0)), &mut covered)?;
        }
        if c.get(len - 1) >= 2 {
            place(len - 2, Tile::RightBoundary(c.get(len - 1)), &mut covered)?;
        } else if c.get(len - 2) == 2 {
            place(len - 3, Tile::EndDimer, &mut covered)?;
        } else if c.get(len - 1) == 1 {
            place(len - 1, Tile::EndMonomer, &mut covered)?;
        }
    }
    for i in 0..len {
        if c.get(i) == 2 && !covered[i] {
            let start = if open { i - 1 } else { (i + len - 1) % len };
            place(start, Tile::Dimer, &mut covered)?;
        }
    }
    for i in 0..len {
        if c.get(i) == 1 && !covered[i] {
            place(i, Tile::Monomer, &mut covered)?;
        }
    }
    for i in 0..len {
        if !covered[i] {
            place(i, Tile::Void, &mut covered)?;
        }
    }
    let mut starts: Vec<usize> = placed.keys().copied().collect();
    starts.sort_unstable();
    let tiles: Vec<Tile> = starts.iter().map(|s| placed[s]).collect();
    let tiling = if open {
        Tiling::open(tiles)?
    } else {
        Tiling::periodic(tiles, starts[0])?
    };
    if tiling.to_config() != *c {
        return Err(Error::InvalidTiling(format!(
            "placement for {c} produced {}",
            tiling.to_config()
        )));
    }
    Ok(tiling)
}

/// r_L = r_{L−1} + r_{L−2}, r_0 = r_1 = 1: the number of monomer/void
/// covers of an open chain of L sites.
pub fn count_roots(len: usize) -> u128 {
    let (mut a, mut b) = (1u128, 1u128);
    for _ in 0..len {
        (a, b) = (b, a + b);
    }
    a
}

/// r_L from the golden-ratio closed form, evaluated exactly in ℤ[√5]/2.
pub fn count_roots_closed_form(len: usize) -> u128 {
    // (a + b√5)/2 with a ≡ b (mod 2).
    let mul = |(a1, b1): (i128, i128), (a2, b2): (i128, i128)| {
        ((a1 * a2 + 5 * b1 * b2) / 2, (a1 * b2 + a2 * b1) / 2)
    };
    let golden = (1i128, 1i128);
    let mut power = (2i128, 0i128);
    for _ in 0..=len {
        power = mul(power, golden);
    }
    // φ^{L+1} − ψ^{L+1} = b√5, so the quotient by √5 is b.
    power.1 as u128
}

/// Number of ring roots, r_L + r_{L−2}.
pub fn count_periodic_roots(len: usize) -> u128 {
    count_roots(len) + if len >= 2 { count_roots(len - 2) } else { 0 }
}

/// Number of open-chain bulk roots: Σ r_{L−|R_l|−|R_r|} over the boundary pairs.
pub fn count_bulk_roots(len: usize) -> u128 {
    let lefts = [1usize, 2, 3];
    let rights = [1usize, 2, 1, 2];
    lefts
        .iter()
        .flat_map(|l| rights.iter().map(move |r| l + r))
        .filter(|&e| e <= len)
        .map(|e| count_roots(len - e))
        .sum()
}
