//! Text descriptors for maps, chains and progression families.
//!
//! ```text
//! square | cube | inverse | linear:a=<a> | rational:P=<c,..>;Q=<c,..>[;poles=<x:v,..>]
//! chain:<variant>[;map=<map>];gamma=<g>[;p=<p>]
//! delta=<d>;aps=<start:len,..>
//! ```
//!
//! Coefficients are decimal residues, low degree first. Poles without an
//! explicit value are sent to 0.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::field::PrimeFieldCtx;
use crate::kernel::{ChainSpec, Variant};
use crate::map::{PoleAssignments, RationalMap, TotalMap};
use crate::progression::{APFamily, Progression};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapDescriptor {
    Square,
    Cube,
    Inverse,
    Linear { a: u64 },
    Rational { num: Vec<u64>, den: Vec<u64>, poles: Vec<(u64, u64)> },
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn parse_u64(s: &str) -> Result<u64> {
    s.trim().parse().map_err(|_| parse_err(format!("not a non-negative integer: {s:?}")))
}

fn parse_list(s: &str) -> Result<Vec<u64>> {
    s.split(',').map(parse_u64).collect()
}

fn parse_pairs(s: &str) -> Result<Vec<(u64, u64)>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|pair| {
            let (a, b) = pair.split_once(':').ok_or_else(|| parse_err(format!("expected a:b, got {pair:?}")))?;
            Ok((parse_u64(a)?, parse_u64(b)?))
        })
        .collect()
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

impl MapDescriptor {
    /// Materializes the map over `ctx`.
    pub fn build(&self, ctx: &PrimeFieldCtx) -> Result<TotalMap> {
        match self {
            MapDescriptor::Square => Ok(TotalMap::square(ctx)),
            MapDescriptor::Linear { a } => Ok(TotalMap::linear(ctx, *a)),
            MapDescriptor::Inverse => Ok(TotalMap::inverse(ctx)),
            MapDescriptor::Cube => TotalMap::rational(ctx, RationalMap::cube(ctx), PoleAssignments::new()),
            MapDescriptor::Rational { num, den, poles } => {
                let map = RationalMap::from_coeffs(ctx, num, den)?;
                let roots = map.poles(ctx);
                let mut assigned = map.zero_pole_assignments(ctx);
                for &(x, v) in poles {
                    let x = ctx.reduce(x);
                    if !roots.contains(&x) {
                        return Err(Error::InvalidArgument("pole value given at a non-pole"));
                    }
                    assigned.insert(x, ctx.reduce(v));
                }
                TotalMap::rational(ctx, map, assigned)
            }
        }
    }

    /// The underlying rational function, when there is one.
    pub fn rational_map(&self, ctx: &PrimeFieldCtx) -> Result<Option<(RationalMap, PoleAssignments)>> {
        let total = match self {
            MapDescriptor::Square | MapDescriptor::Linear { .. } => return Ok(None),
            _ => self.build(ctx)?,
        };
        Ok(match total.provenance() {
            crate::map::Provenance::Rational { map, poles } => Some((map.clone(), poles.clone())),
            _ => None,
        })
    }
}

impl FromStr for MapDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, rest) = s.split_once(':').unwrap_or((s, ""));
        match head {
            "square" if rest.is_empty() => Ok(MapDescriptor::Square),
            "cube" if rest.is_empty() => Ok(MapDescriptor::Cube),
            "inverse" if rest.is_empty() => Ok(MapDescriptor::Inverse),
            "linear" => {
                let a = rest.strip_prefix("a=").ok_or_else(|| parse_err("linear map needs a=<a>"))?;
                Ok(MapDescriptor::Linear { a: parse_u64(a)? })
            }
            "rational" => {
                let (mut num, mut den, mut poles) = (None, None, Vec::new());
                for seg in rest.split(';').filter(|s| !s.is_empty()) {
                    let (k, v) = seg.split_once('=').ok_or_else(|| parse_err(format!("bad segment {seg:?}")))?;
                    match k.trim() {
                        "P" => num = Some(parse_list(v)?),
                        "Q" => den = Some(parse_list(v)?),
                        "poles" => poles = parse_pairs(v)?,
                        other => return Err(parse_err(format!("unknown rational key {other:?}"))),
                    }
                }
                Ok(MapDescriptor::Rational {
                    num: num.ok_or_else(|| parse_err("rational map needs P="))?,
                    den: den.ok_or_else(|| parse_err("rational map needs Q="))?,
                    poles,
                })
            }
            _ => Err(parse_err(format!("unknown map {s:?}"))),
        }
    }
}

impl fmt::Display for MapDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapDescriptor::Square => f.write_str("square"),
            MapDescriptor::Cube => f.write_str("cube"),
            MapDescriptor::Inverse => f.write_str("inverse"),
            MapDescriptor::Linear { a } => write!(f, "linear:a={a}"),
            MapDescriptor::Rational { num, den, poles } => {
                write!(f, "rational:P={};Q={}", join(num), join(den))?;
                if !poles.is_empty() {
                    write!(f, ";poles={}", join(poles.iter().map(|(x, v)| format!("{x}:{v}"))))?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "lazy-hold" | "lazy" => Ok(Variant::LazyHold),
            "noise-zero" => Ok(Variant::NoiseZero),
            "pure-additive" | "additive" => Ok(Variant::PureAdditive),
            "non-lazy" => Ok(Variant::NonLazy),
            other => Err(parse_err(format!("unknown variant {other:?}"))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A chain descriptor. `p` may be left open for sweep templates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainDescriptor {
    pub variant: Variant,
    pub map: Option<MapDescriptor>,
    pub gamma: u64,
    pub p: Option<u64>,
}

impl ChainDescriptor {
    pub fn build(&self) -> Result<ChainSpec> {
        let p = self.p.ok_or(Error::InvalidArgument("chain descriptor has no p"))?;
        self.build_for(p)
    }

    /// Builds the chain over `F_p`, ignoring any `p` in the descriptor.
    pub fn build_for(&self, p: u64) -> Result<ChainSpec> {
        let ctx = PrimeFieldCtx::new(p)?;
        match (&self.map, self.variant) {
            (_, Variant::PureAdditive) => ChainSpec::pure_additive(&ctx, self.gamma),
            (Some(m), v) => ChainSpec::new(m.build(&ctx)?, self.gamma, v),
            (None, _) => Err(Error::InvalidArgument("chain needs map=")),
        }
    }

    pub fn with_p(&self, p: u64) -> Self {
        Self { p: Some(p), ..self.clone() }
    }

    /// Descriptor label without the `p` field.
    pub fn template(&self) -> String {
        Self { p: None, ..self.clone() }.to_string()
    }
}

impl FromStr for ChainDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut segs = s.trim().split(';');
        let head = segs.next().unwrap_or("");
        let variant: Variant = head
            .strip_prefix("chain:")
            .ok_or_else(|| parse_err("chain descriptor must start with chain:"))?
            .parse()?;
        let (mut map_text, mut gamma, mut p) = (None::<String>, None, None);
        for seg in segs.filter(|s| !s.is_empty()) {
            let (k, v) = seg.split_once('=').ok_or_else(|| parse_err(format!("bad segment {seg:?}")))?;
            match k.trim() {
                "map" => map_text = Some(v.trim().to_string()),
                "gamma" => gamma = Some(parse_u64(v)?),
                "p" => p = Some(parse_u64(v)?),
                "P" | "Q" | "poles" => match map_text.as_mut() {
                    Some(m) => {
                        m.push(';');
                        m.push_str(seg.trim());
                    }
                    None => return Err(parse_err(format!("{k}= before map="))),
                },
                other => return Err(parse_err(format!("unknown chain key {other:?}"))),
            }
        }
        let map = map_text.map(|m| m.parse()).transpose()?;
        Ok(ChainDescriptor { variant, map, gamma: gamma.ok_or_else(|| parse_err("chain needs gamma="))?, p })
    }
}

impl fmt::Display for ChainDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chain:{}", self.variant)?;
        if let Some(m) = &self.map {
            write!(f, ";map={m}")?;
        }
        write!(f, ";gamma={}", self.gamma)?;
        if let Some(p) = self.p {
            write!(f, ";p={p}")?;
        }
        Ok(())
    }
}

/// A family of progressions with a common difference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyDescriptor {
    pub delta: u64,
    pub aps: Vec<(u64, usize)>,
}

impl FamilyDescriptor {
    pub fn build(&self, ctx: &PrimeFieldCtx) -> Result<APFamily> {
        let progs = self.aps.iter().map(|&(s, l)| Progression::new(ctx.reduce(s), l)).collect();
        APFamily::new(ctx, self.delta, progs)
    }
}

impl FromStr for FamilyDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (mut delta, mut aps) = (None, None);
        for seg in s.trim().split(';').filter(|s| !s.is_empty()) {
            let (k, v) = seg.split_once('=').ok_or_else(|| parse_err(format!("bad segment {seg:?}")))?;
            match k.trim() {
                "delta" => delta = Some(parse_u64(v)?),
                "aps" => aps = Some(parse_pairs(v)?.into_iter().map(|(a, l)| (a, l as usize)).collect()),
                other => return Err(parse_err(format!("unknown family key {other:?}"))),
            }
        }
        Ok(FamilyDescriptor {
            delta: delta.ok_or_else(|| parse_err("family needs delta="))?,
            aps: aps.ok_or_else(|| parse_err("family needs aps="))?,
        })
    }
}

impl fmt::Display for FamilyDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "delta={};aps={}", self.delta, join(self.aps.iter().map(|(s, l)| format!("{s}:{l}"))))
    }
}
