//! Two-entity framing game, collusion-resistance thresholds and robustness
//! pricing. All money is exact rational arithmetic.

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ledger::FramingReward;

pub type Money = Ratio<i128>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EconError {
    #[error("collusion needs a + b ≥ t + 1 (a={a}, b={b}, t={t})")]
    NoCollusion { a: u64, b: u64, t: u64 },
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("cannot parse `{0}` as a rational")]
    Parse(String),
}

/// Parses `"3"`, `"-1/4"` or `"0.25"` exactly.
pub fn parse_ratio(s: &str) -> Result<Money, EconError> {
    let err = || EconError::Parse(s.to_string());
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let (p, q): (i128, i128) = (p.trim().parse().map_err(|_| err())?, q.trim().parse().map_err(|_| err())?);
        if q == 0 {
            return Err(err());
        }
        return Ok(Money::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || frac.len() > 30 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let neg = int.starts_with('-');
        let int: i128 = if int.is_empty() || int == "-" { 0 } else { int.parse().map_err(|_| err())? };
        let den = 10i128.pow(frac.len() as u32);
        let f: i128 = frac.parse().map_err(|_| err())?;
        let mag = int.abs() * den + f;
        return Ok(Money::new(if neg { -mag } else { mag }, den));
    }
    Ok(Money::from_integer(s.parse().map_err(|_| err())?))
}

pub fn format_ratio(x: &Money) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub mod ratio_str {
    use super::{format_ratio, parse_ratio, Money};
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Money, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_ratio(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Money, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Float(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(i) => Ok(Money::from_integer(i as i128)),
            Raw::Float(f) => parse_ratio(&f.to_string()).map_err(de::Error::custom),
            Raw::Str(s) => parse_ratio(&s).map_err(de::Error::custom),
        }
    }
}

/// Exact value with a float rendering for humans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    #[serde(with = "ratio_str")]
    pub exact: Money,
    pub approx: f64,
}

impl From<Money> for Quantity {
    fn from(exact: Money) -> Self {
        Quantity { approx: exact.to_f64().unwrap_or(f64::NAN), exact }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EconParams {
    /// Total value held by the system.
    #[serde(with = "ratio_str")]
    pub r: Money,
    #[serde(with = "ratio_str")]
    pub delta: Money,
    /// Share of `R` paid to participants.
    #[serde(with = "ratio_str")]
    pub alpha: Money,
    pub t: u64,
    pub n: u64,
    #[serde(default)]
    pub framing_reward: FramingReward,
}

impl EconParams {
    pub fn new(r: i128, delta: i128, alpha: Money, t: u64, n: u64) -> Self {
        EconParams {
            r: Money::from_integer(r),
            delta: Money::from_integer(delta),
            alpha,
            t,
            n,
            framing_reward: FramingReward::Full,
        }
    }

    /// The lottery parameters: `R = 10^6`, `Δ = 10^4`, `α = 1/4`, `n = 250`, `t = 225`.
    pub fn lottery() -> Self {
        Self::new(1_000_000, 10_000, Money::new(1, 4), 225, 250)
    }

    pub fn validate(&self) -> Result<(), EconError> {
        if self.alpha < Money::zero() || self.alpha > Money::from_integer(1) {
            return Err(EconError::Params("alpha must lie in [0, 1]".into()));
        }
        if self.t >= self.n {
            return Err(EconError::Params(format!("need t < n (t={}, n={})", self.t, self.n)));
        }
        if self.r.is_negative() || self.delta.is_negative() {
            return Err(EconError::Params("money must be non-negative".into()));
        }
        Ok(())
    }

    fn t(&self) -> Money {
        Money::from_integer(self.t as i128)
    }

    fn n(&self) -> Money {
        Money::from_integer(self.n as i128)
    }

    pub fn framer_reward(&self) -> Money {
        match self.framing_reward {
            FramingReward::Full => self.t() * self.delta,
            FramingReward::Half => self.t() * self.delta / 2,
        }
    }

    /// Multiplies every monetary value by `k`.
    pub fn scaled(&self, k: i128) -> Self {
        EconParams { r: self.r * k, delta: self.delta * k, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Frame,
    NotFrame,
}

impl Strategy {
    pub const ALL: [Strategy; 2] = [Strategy::Frame, Strategy::NotFrame];

    fn idx(self) -> usize {
        match self {
            Strategy::Frame => 0,
            Strategy::NotFrame => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    #[serde(with = "ratio_str")]
    pub a: Money,
    #[serde(with = "ratio_str")]
    pub b: Money,
}

/// `cells[sA][sB]`, indices `0 = frame`, `1 = not frame`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PayoffMatrix {
    pub a: u64,
    pub b: u64,
    pub cells: [[Cell; 2]; 2],
    /// `(frame, frame)` is the expected value of a fair race for who frames first.
    pub race_probability: String,
    /// Per-participant bound `R/(t+1)` on the cooperative split.
    #[serde(with = "ratio_str")]
    pub cooperative_bound: Money,
}

impl PayoffMatrix {
    pub fn payoff(&self, sa: Strategy, sb: Strategy) -> &Cell {
        &self.cells[sa.idx()][sb.idx()]
    }

    pub fn swapped(&self) -> PayoffMatrix {
        let c = |x: Strategy, y: Strategy| {
            let cell = self.payoff(y, x);
            Cell { a: cell.b, b: cell.a }
        };
        use Strategy::*;
        PayoffMatrix {
            a: self.b,
            b: self.a,
            cells: [[c(Frame, Frame), c(Frame, NotFrame)], [c(NotFrame, Frame), c(NotFrame, NotFrame)]],
            race_probability: self.race_probability.clone(),
            cooperative_bound: self.cooperative_bound,
        }
    }
}

pub fn payoff_matrix(a: u64, b: u64, p: &EconParams) -> Result<PayoffMatrix, EconError> {
    if a + b < p.t + 1 {
        return Err(EconError::NoCollusion { a, b, t: p.t });
    }
    let (am, bm) = (Money::from_integer(a as i128), Money::from_integer(b as i128));
    let reward = p.framer_reward();
    let frame_a = reward - am * p.delta;
    let frame_b = reward - bm * p.delta;
    let race_a = (frame_a - am * p.delta) / 2;
    let race_b = (frame_b - bm * p.delta) / 2;
    let coop_a = p.r * am / (am + bm);
    let coop_b = p.r * bm / (am + bm);
    Ok(PayoffMatrix {
        a,
        b,
        cells: [
            [Cell { a: race_a, b: race_b }, Cell { a: frame_a, b: -bm * p.delta }],
            [Cell { a: -am * p.delta, b: frame_b }, Cell { a: coop_a, b: coop_b }],
        ],
        race_probability: "1/2".into(),
        cooperative_bound: p.r / (p.t() + 1),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dominant {
    Frame,
    NotFrame,
    None,
}

impl From<Strategy> for Dominant {
    fn from(s: Strategy) -> Self {
        match s {
            Strategy::Frame => Dominant::Frame,
            Strategy::NotFrame => Dominant::NotFrame,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominantStrategies {
    pub a: Dominant,
    pub b: Dominant,
}

fn strictly_dominant(u: impl Fn(Strategy, Strategy) -> Money) -> Dominant {
    for s in Strategy::ALL {
        let other = if s == Strategy::Frame { Strategy::NotFrame } else { Strategy::Frame };
        if Strategy::ALL.iter().all(|opp| u(s, *opp) > u(other, *opp)) {
            return s.into();
        }
    }
    Dominant::None
}

pub fn dominant_strategy(m: &PayoffMatrix) -> DominantStrategies {
    DominantStrategies {
        a: strictly_dominant(|sa, sb| m.payoff(sa, sb).a),
        b: strictly_dominant(|sb, sa| m.payoff(sa, sb).b),
    }
}

/// Pure Nash equilibria by best-response enumeration.
pub fn brute_force_equilibrium(m: &PayoffMatrix) -> Vec<(Strategy, Strategy)> {
    let mut out = Vec::new();
    for sa in Strategy::ALL {
        for sb in Strategy::ALL {
            let a_best = Strategy::ALL.iter().all(|d| m.payoff(*d, sb).a <= m.payoff(sa, sb).a);
            let b_best = Strategy::ALL.iter().all(|d| m.payoff(sa, *d).b <= m.payoff(sa, sb).b);
            if a_best && b_best {
                out.push((sa, sb));
            }
        }
    }
    out
}

/// Dominance and enumeration agree: any strictly dominant strategy appears in
/// every equilibrium, and two of them pin the unique equilibrium.
pub fn equilibrium_consistent(m: &PayoffMatrix) -> bool {
    let d = dominant_strategy(m);
    let eq = brute_force_equilibrium(m);
    let fits = |dom: Dominant, s: Strategy| dom == Dominant::None || Dominant::from(s) == dom;
    if !eq.iter().all(|(sa, sb)| fits(d.a, *sa) && fits(d.b, *sb)) {
        return false;
    }
    match (d.a, d.b) {
        (Dominant::None, _) | (_, Dominant::None) => true,
        _ => eq.len() == 1,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollusionReport {
    /// `(t-1)Δ/2`
    pub condition_bound: Quantity,
    /// `R < (t-1)Δ/2`
    pub condition_holds: bool,
    /// Framing is strictly dominant for every minority side, so rational colluders defect.
    pub collusion_resistant: bool,
    /// `(t+1)Δ/2`
    pub investment_threshold: Quantity,
    /// Participants an entity must control to reach the threshold.
    pub participants_threshold: u64,
    /// `(3t-1)Δ/4`
    pub side_contract_bound: Quantity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_entity_investment: Option<Quantity>,
    /// No entity reaches the threshold, so no collusion can form.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub collusion_impossible: Option<bool>,
}

pub fn collusion_resistance_report(p: &EconParams, max_entity_investment: Option<Money>) -> CollusionReport {
    let t = p.t();
    let bound = (t - 1) * p.delta / 2;
    let threshold = (t + 1) * p.delta / 2;
    let holds = p.r < bound;
    CollusionReport {
        condition_bound: bound.into(),
        condition_holds: holds,
        collusion_resistant: holds,
        investment_threshold: threshold.into(),
        participants_threshold: (p.t + 2) / 2,
        side_contract_bound: ((t * 3 - 1) * p.delta / 4).into(),
        max_entity_investment: max_entity_investment.map(Quantity::from),
        collusion_impossible: max_entity_investment.map(|m| holds && m < threshold),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    /// `Δ/2`
    pub fail_dkg_price: Quantity,
    /// `(t+1)·αR/n`, the rewards colluders forgo by framing themselves.
    pub self_framing_reward_price: Quantity,
    /// `tΔ`, deposits of the colluders other than the framer.
    pub self_framing_burned_deposits: Quantity,
    /// `(n-t)Δ`
    pub non_cooperation_price: Quantity,
    /// `2n(n-t)/t²`
    pub balanced_alpha: Quantity,
    /// `αR/(nΔ)`
    pub roi: Quantity,
    /// `αR`
    pub participant_reward_pool: Quantity,
}

pub fn robustness_report(p: &EconParams) -> RobustnessReport {
    let (t, n) = (p.t(), p.n());
    RobustnessReport {
        fail_dkg_price: (p.delta / 2).into(),
        self_framing_reward_price: ((t + 1) * p.alpha * p.r / n).into(),
        self_framing_burned_deposits: (t * p.delta).into(),
        non_cooperation_price: ((n - t) * p.delta).into(),
        balanced_alpha: (n * (n - t) * 2 / (t * t)).into(),
        roi: if p.delta.is_zero() { Money::zero().into() } else { (p.alpha * p.r / (n * p.delta)).into() },
        participant_reward_pool: (p.alpha * p.r).into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepCell {
    pub a: u64,
    pub b: u64,
    pub dominant: DominantStrategies,
    pub equilibria: Vec<(Strategy, Strategy)>,
    pub consistent: bool,
    /// The smaller side is below `(t+1)/2` and frames.
    pub minority_frames: Option<bool>,
}

/// Every split `a + b = t + 1`, `a ∈ [1, t]`.
pub fn split_sweep(p: &EconParams) -> Vec<SweepCell> {
    (1..=p.t)
        .map(|a| {
            let b = p.t + 1 - a;
            let m = payoff_matrix(a, b, p).expect("a + b = t + 1");
            let dominant = dominant_strategy(&m);
            let minority = a.min(b);
            let minority_frames = (2 * minority < p.t + 1).then(|| {
                let side = if a <= b { dominant.a } else { dominant.b };
                side == Dominant::Frame
            });
            SweepCell {
                a,
                b,
                dominant,
                equilibria: brute_force_equilibrium(&m),
                consistent: equilibrium_consistent(&m),
                minority_frames,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EconReport {
    pub params: EconParams,
    pub collusion: CollusionReport,
    pub robustness: RobustnessReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<PayoffMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dominant: Option<DominantStrategies>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equilibria: Option<Vec<(Strategy, Strategy)>>,
}

pub fn full_report(p: &EconParams, split: Option<(u64, u64)>, max_investment: Option<Money>) -> Result<EconReport, EconError> {
    p.validate()?;
    let matrix = split.map(|(a, b)| payoff_matrix(a, b, p)).transpose()?;
    Ok(EconReport {
        params: *p,
        collusion: collusion_resistance_report(p, max_investment),
        robustness: robustness_report(p),
        dominant: matrix.as_ref().map(dominant_strategy),
        equilibria: matrix.as_ref().map(brute_force_equilibrium),
        matrix,
    })
}
