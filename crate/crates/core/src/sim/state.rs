//! Graph-level state of the process and the one-step transition.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Colour, FitnessModel, ModelKind, TypeAssignment};
use crate::sim::sampler::WeightIndex;
use crate::sim::statespace::AdditiveDomain;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InitialVertex {
    pub colour: Colour,
    pub degree: u64,
}

/// Degrees and colours of `G_0`. Edges are not retained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InitialGraph {
    pub vertices: Vec<InitialVertex>,
}

impl InitialGraph {
    /// One red and one blue vertex joined by `edges` parallel edges.
    pub fn pair(edges: u64) -> Self {
        Self {
            vertices: vec![
                InitialVertex {
                    colour: Colour::Red,
                    degree: edges,
                },
                InitialVertex {
                    colour: Colour::Blue,
                    degree: edges,
                },
            ],
        }
    }

    /// Default seed graph: a red and a blue vertex joined by `2m` parallel
    /// edges. Its total degree is `2m` per vertex, so the additive statistics
    /// stay inside their parallelogram from the first step, and each vertex has
    /// degree at least `m + 1`.
    pub fn default_for(m: usize) -> Self {
        Self::pair(2 * m as u64)
    }

    pub fn total_degree(&self) -> u64 {
        self.vertices.iter().map(|v| v.degree).sum()
    }

    pub fn degree_of(&self, colour: Colour) -> u64 {
        self.vertices
            .iter()
            .filter(|v| v.colour == colour)
            .map(|v| v.degree)
            .sum()
    }

    pub fn count_of(&self, colour: Colour) -> u64 {
        self.vertices.iter().filter(|v| v.colour == colour).count() as u64
    }

    /// Total degree equals `2m` times the number of vertices.
    pub fn is_balanced(&self, m: usize) -> bool {
        self.total_degree() == 2 * m as u64 * self.vertices.len() as u64
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInitialGraph(msg));
        if self.count_of(Colour::Red) == 0 || self.count_of(Colour::Blue) == 0 {
            return bad("need at least one vertex of each colour".into());
        }
        if let Some(v) = self.vertices.iter().find(|v| v.degree < m as u64) {
            return bad(format!("vertex degree {} is below m = {m}", v.degree));
        }
        if self.total_degree() % 2 != 0 {
            return bad(format!("total degree {} is odd", self.total_degree()));
        }
        Ok(())
    }
}

/// Configuration of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub ta: TypeAssignment<f64>,
    pub fitness: FitnessModel<f64>,
    /// `None` selects [`InitialGraph::default_for`].
    #[serde(default)]
    pub initial: Option<InitialGraph>,
    pub seed: u64,
    pub steps: u64,
    /// Record every `record_every` steps (0 disables periodic records).
    #[serde(default)]
    pub record_every: u64,
    /// Additional steps to record.
    #[serde(default)]
    pub record_at: Vec<u64>,
    /// Check state-space invariants at every record.
    #[serde(default = "default_true")]
    pub check_invariants: bool,
}

fn default_true() -> bool {
    true
}

impl SimConfig {
    pub fn new(ta: TypeAssignment<f64>, fitness: FitnessModel<f64>, steps: u64, seed: u64) -> Self {
        Self {
            ta,
            fitness,
            initial: None,
            seed,
            steps,
            record_every: 0,
            record_at: Vec::new(),
            check_invariants: true,
        }
    }

    pub fn initial_graph(&self) -> InitialGraph {
        self.initial
            .clone()
            .unwrap_or_else(|| InitialGraph::default_for(self.ta.m()))
    }

    pub fn validate(&self) -> Result<()> {
        self.fitness.validate(self.ta.m())?;
        self.initial_graph().validate(self.ta.m())
    }
}

/// The `m` draws and the colour of the new vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepOutcome {
    pub neighbours: Vec<usize>,
    /// Red neighbours, with multiplicity.
    pub red_neighbours: usize,
    pub new_colour: Colour,
}

/// Weight of a vertex is `(degree + offset) * scale`, both depending on colour.
#[derive(Debug, Clone, Copy, PartialEq)]
struct WeightRule {
    offset: [f64; 2],
    scale: [f64; 2],
}

impl WeightRule {
    fn new(fitness: &FitnessModel<f64>) -> Self {
        match *fitness {
            FitnessModel::Plain { alpha } => Self {
                offset: [alpha, alpha],
                scale: [1.0, 1.0],
            },
            FitnessModel::Multiplicative { phi, alpha } => Self {
                offset: [alpha, alpha],
                scale: [1.0, phi],
            },
            FitnessModel::Additive {
                alpha_red,
                alpha_blue,
            } => Self {
                offset: [alpha_red, alpha_blue],
                scale: [1.0, 1.0],
            },
        }
    }

    fn weight(&self, degree: u64, colour: Colour) -> f64 {
        let c = colour_index(colour);
        (degree as f64 + self.offset[c]) * self.scale[c]
    }

    fn per_degree(&self, colour: Colour) -> f64 {
        self.scale[colour_index(colour)]
    }
}

fn colour_index(c: Colour) -> usize {
    match c {
        Colour::Red => 0,
        Colour::Blue => 1,
    }
}

/// Degrees, colours, colour aggregates and the sampler.
#[derive(Debug, Clone)]
pub struct SimState {
    ta: TypeAssignment<f64>,
    fitness: FitnessModel<f64>,
    rule: WeightRule,
    degrees: Vec<u64>,
    colours: Vec<Colour>,
    red_degree: u64,
    blue_degree: u64,
    reds: u64,
    blues: u64,
    n: u64,
    initial_total_degree: u64,
    initial_balanced: bool,
    initial_tight: bool,
    sampler: WeightIndex,
    draws: Vec<usize>,
}

impl SimState {
    /// Initializes from `G_0`, reserving room for `extra_capacity` arrivals.
    pub fn new(
        ta: TypeAssignment<f64>,
        fitness: FitnessModel<f64>,
        initial: &InitialGraph,
        extra_capacity: usize,
    ) -> Result<Self> {
        let m = ta.m();
        fitness.validate(m)?;
        initial.validate(m)?;
        let rule = WeightRule::new(&fitness);
        let capacity = initial.vertices.len() + extra_capacity;
        let mut sampler = WeightIndex::with_capacity(capacity);
        let mut degrees = Vec::with_capacity(capacity);
        let mut colours = Vec::with_capacity(capacity);
        for v in &initial.vertices {
            let w = rule.weight(v.degree, v.colour);
            if !(w > 0.0) {
                return Err(Error::InvalidInitialGraph(format!(
                    "vertex with degree {} has non-positive weight {w}",
                    v.degree
                )));
            }
            sampler.push(w);
            degrees.push(v.degree);
            colours.push(v.colour);
        }
        let red_degree = initial.degree_of(Colour::Red);
        let blue_degree = initial.degree_of(Colour::Blue);
        let reds = initial.count_of(Colour::Red);
        let blues = initial.count_of(Colour::Blue);
        let m1 = m as u64 + 1;
        Ok(Self {
            rule,
            degrees,
            colours,
            red_degree,
            blue_degree,
            reds,
            blues,
            n: 0,
            initial_total_degree: initial.total_degree(),
            initial_balanced: initial.is_balanced(m),
            initial_tight: m1 * reds <= red_degree && m1 * blues <= blue_degree,
            sampler,
            draws: Vec::with_capacity(m),
            ta,
            fitness,
        })
    }

    /// State at `n = 0` for `cfg`, with capacity for all its steps.
    pub fn from_config(cfg: &SimConfig) -> Result<Self> {
        Self::new(
            cfg.ta.clone(),
            cfg.fitness.clone(),
            &cfg.initial_graph(),
            cfg.steps as usize,
        )
    }

    pub fn m(&self) -> usize {
        self.ta.m()
    }

    pub fn type_assignment(&self) -> &TypeAssignment<f64> {
        &self.ta
    }

    pub fn fitness(&self) -> &FitnessModel<f64> {
        &self.fitness
    }

    /// Steps taken since `G_0`.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// `X_n`, total degree of red vertices.
    pub fn red_degree(&self) -> u64 {
        self.red_degree
    }

    /// `Y_n`.
    pub fn blue_degree(&self) -> u64 {
        self.blue_degree
    }

    /// `A_n`.
    pub fn reds(&self) -> u64 {
        self.reds
    }

    /// `B_n`.
    pub fn blues(&self) -> u64 {
        self.blues
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    pub fn colours(&self) -> &[Colour] {
        &self.colours
    }

    pub fn sampler(&self) -> &WeightIndex {
        &self.sampler
    }

    pub fn initial_total_degree(&self) -> u64 {
        self.initial_total_degree
    }

    /// `G_0` has total degree `2m` per vertex.
    pub fn initial_balanced(&self) -> bool {
        self.initial_balanced
    }

    /// Affine offset on the plain/multiplicative weights (`None` for additive).
    fn alpha(&self) -> Option<f64> {
        self.fitness.phi_alpha().map(|(_, a)| a)
    }

    fn phi(&self) -> f64 {
        self.fitness.phi_alpha().map_or(1.0, |(p, _)| p)
    }

    /// Red and blue mass before the blue multiplier:
    /// `(X + a_red A, Y + a_blue B)`.
    pub fn colour_masses(&self) -> (f64, f64) {
        let [a_red, a_blue] = self.rule.offset;
        (
            self.red_degree as f64 + a_red * self.reds as f64,
            self.blue_degree as f64 + a_blue * self.blues as f64,
        )
    }

    /// Closed-form total attachment weight `sum_v w_v`.
    pub fn total_weight(&self) -> f64 {
        let (r, b) = self.colour_masses();
        r + self.phi() * b
    }

    /// Probability that one draw picks a red vertex.
    pub fn red_draw_probability(&self) -> f64 {
        let (r, b) = self.colour_masses();
        r / (r + self.phi() * b)
    }

    /// Constant `c` with `X + Y + alpha (A + B) = (2m + alpha) n + c`
    /// (plain and multiplicative models).
    pub fn mass_constant(&self) -> Option<f64> {
        let alpha = self.alpha()?;
        let m = self.m() as f64;
        let (r, b) = self.colour_masses();
        Some(r + b - (2.0 * m + alpha) * self.n as f64)
    }

    /// Additive time index `tau_n = (X_n + Y_n) / 2m`, which increases by one
    /// per step and equals the vertex count when `G_0` is balanced.
    pub fn additive_time(&self) -> f64 {
        (self.red_degree + self.blue_degree) as f64 / (2.0 * self.m() as f64)
    }

    /// Plain/multiplicative `x_n = (X + alpha A) / ((2m + alpha) n + c)`.
    pub fn mass_share(&self) -> f64 {
        let (r, b) = self.colour_masses();
        r / (r + b)
    }

    /// Additive `(x_n, y_n) = ((X + a1 A)/tau, (Y + a2 B)/tau)`.
    pub fn additive_coordinates(&self) -> (f64, f64) {
        let (r, b) = self.colour_masses();
        let tau = self.additive_time();
        (r / tau, b / tau)
    }

    pub fn red_fraction(&self) -> f64 {
        self.reds as f64 / (self.reds + self.blues) as f64
    }

    /// The statistic whose limit the theory describes: `x_n` for the plain
    /// and multiplicative models, `q_n = x_n/(x_n+y_n)` for the additive model.
    pub fn red_statistic(&self) -> f64 {
        match self.fitness.kind() {
            ModelKind::Additive => self.red_draw_probability(),
            _ => self.mass_share(),
        }
    }

    /// Advances one step and reports the draws.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> StepOutcome {
        let (red_neighbours, new_colour) = self.advance(rng);
        StepOutcome {
            neighbours: self.draws.clone(),
            red_neighbours,
            new_colour,
        }
    }

    /// Advances one step: `m` independent draws from the weights of `G_n`,
    /// colour choice with probability `p_K`, then all updates.
    pub fn advance<R: Rng + ?Sized>(&mut self, rng: &mut R) -> (usize, Colour) {
        let m = self.m();
        self.draws.clear();
        for _ in 0..m {
            let v = self.sampler.sample(rng);
            self.draws.push(v);
        }
        let k = self
            .draws
            .iter()
            .filter(|&&v| self.colours[v].is_red())
            .count();
        let u: f64 = rng.random();
        let colour = if u < *self.ta.p_k(k) {
            Colour::Red
        } else {
            Colour::Blue
        };
        for i in 0..m {
            let v = self.draws[i];
            let c = self.colours[v];
            self.degrees[v] += 1;
            self.sampler.add(v, self.rule.per_degree(c));
            match c {
                Colour::Red => self.red_degree += 1,
                Colour::Blue => self.blue_degree += 1,
            }
        }
        let w = self.rule.weight(m as u64, colour);
        assert!(w > 0.0, "new vertex weight {w} is not positive");
        self.sampler.push(w);
        self.degrees.push(m as u64);
        self.colours.push(colour);
        match colour {
            Colour::Red => {
                self.reds += 1;
                self.red_degree += m as u64;
            }
            Colour::Blue => {
                self.blues += 1;
                self.blue_degree += m as u64;
            }
        }
        self.n += 1;
        (k, colour)
    }

    /// Checks conservation laws, degree bounds, sampler totals and, for the
    /// additive model with a balanced `G_0`, the state-space parallelograms.
    pub fn check_invariants(&self) -> Result<()> {
        let fail = |detail: String| {
            Err(Error::InvariantViolation {
                step: self.n,
                detail,
            })
        };
        let m = self.m() as u64;
        let total = self.red_degree + self.blue_degree;
        if total != self.initial_total_degree + 2 * m * self.n {
            return fail(format!("X+Y = {total} breaks degree conservation"));
        }
        if m * self.reds > self.red_degree || m * self.blues > self.blue_degree {
            return fail("a colour has average degree below m".into());
        }
        if self.ta.has_absorbing_endpoints()
            && self.initial_tight
            && ((m + 1) * self.reds > self.red_degree || (m + 1) * self.blues > self.blue_degree)
        {
            return fail("A_n > X_n/(m+1) with p_0 = 0, p_m = 1".into());
        }
        let w = self.total_weight();
        if (self.sampler.total() - w).abs() > 1e-9 * w {
            return fail(format!("sampler total {} != {w}", self.sampler.total()));
        }
        if let FitnessModel::Additive {
            alpha_red,
            alpha_blue,
        } = self.fitness
        {
            if self.initial_balanced && self.n > 0 {
                let (x, y) = self.additive_coordinates();
                let domain = AdditiveDomain::new(self.m(), alpha_red, alpha_blue);
                if let Err(e) = domain.check_d(x, y, 1e-9) {
                    return fail(e);
                }
                if self.ta.has_absorbing_endpoints() && self.initial_tight {
                    if let Err(e) = domain.check_d0(x, y, 1e-9) {
                        return fail(e);
                    }
                }
            }
        }
        Ok(())
    }
}
