//! Random closed well-typed EPCF computations for differential testing.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::effects::ObservationFamily;
use crate::syntax::epcf::{Comp, OpArgs, Value};
use crate::syntax::{EpcfType, Name};

#[derive(Clone, Debug)]
pub struct GenConfig {
    /// Upper bound on the size of generated computations.
    pub max_size: usize,
    /// Largest numeral literal.
    pub max_numeral: u64,
    /// Probability of choosing a recursive definition when one fits.
    pub fix_prob: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { max_size: 25, max_numeral: 5, fix_prob: 0.15 }
    }
}

fn nat_to(t: EpcfType) -> EpcfType {
    EpcfType::arrow(EpcfType::Nat, t)
}

/// The types programs are generated at.
pub fn small_types() -> Vec<EpcfType> {
    vec![
        EpcfType::Nat,
        EpcfType::Unit,
        nat_to(EpcfType::Nat),
        EpcfType::arrow(EpcfType::Unit, EpcfType::Nat),
    ]
}

struct Gen<'a, R: Rng> {
    rng: &'a mut R,
    family: &'a ObservationFamily,
    cfg: &'a GenConfig,
    env: Vec<(Name, EpcfType)>,
    counter: usize,
    fixes: usize,
}

impl<R: Rng> Gen<'_, R> {
    fn fresh(&mut self, base: &str) -> Name {
        self.counter += 1;
        format!("{base}{}", self.counter)
    }

    fn with<T>(&mut self, x: &Name, t: EpcfType, f: impl FnOnce(&mut Self) -> T) -> T {
        self.env.push((x.clone(), t));
        let r = f(self);
        self.env.pop();
        r
    }

    fn vars_of(&self, t: &EpcfType) -> Vec<Name> {
        // later bindings shadow earlier ones with the same name
        self.env
            .iter()
            .enumerate()
            .filter(|(i, (x, ty))| ty == t && !self.env[i + 1..].iter().any(|(y, _)| y == x))
            .map(|(_, (x, _))| x.clone())
            .collect()
    }

    fn numeral(&mut self) -> Value {
        Value::numeral(self.rng.gen_range(0..=self.cfg.max_numeral))
    }

    fn value(&mut self, t: &EpcfType, size: usize) -> Value {
        let vars = self.vars_of(t);
        if !vars.is_empty() && self.rng.gen_bool(0.4) {
            return Value::Var(vars.choose(self.rng).unwrap().clone());
        }
        match t {
            EpcfType::Unit => Value::Star,
            EpcfType::Nat => {
                if !vars.is_empty() && self.rng.gen_bool(0.3) {
                    Value::Succ(Box::new(Value::Var(vars.choose(self.rng).unwrap().clone())))
                } else {
                    self.numeral()
                }
            }
            EpcfType::Arrow(a, b) => {
                let x = self.fresh("x");
                let body = self.with(&x, (**a).clone(), |g| g.comp(b, size.saturating_sub(1)));
                Value::lam(x, (**a).clone(), body)
            }
        }
    }

    fn comp(&mut self, t: &EpcfType, size: usize) -> Comp {
        if size <= 1 {
            return Comp::Return(self.value(t, 0));
        }
        let budget = size - 1;
        loop {
            let choice = self.rng.gen_range(0..9);
            match choice {
                0 => return Comp::Return(self.value(t, budget)),
                1 => {
                    let rho = small_types().choose(self.rng).unwrap().clone();
                    let x = self.fresh("v");
                    let (a, b) = split(self.rng, budget);
                    let m = self.comp(&rho, a);
                    let n = self.with(&x, rho, |g| g.comp(t, b));
                    return Comp::let_in(m, x, n);
                }
                2 => {
                    let scrut = self.value(&EpcfType::Nat, 0);
                    let x = self.fresh("n");
                    let (a, b) = split(self.rng, budget);
                    let m = self.comp(t, a);
                    let n = self.with(&x, EpcfType::Nat, |g| g.comp(t, b));
                    return Comp::case(scrut, m, x, n);
                }
                3 => {
                    let funs: Vec<(Name, EpcfType)> = self
                        .env
                        .iter()
                        .filter(|(_, ty)| matches!(ty.as_arrow(), Some((_, cod)) if cod == t))
                        .cloned()
                        .collect();
                    if let Some((f, ty)) = funs.choose(self.rng).cloned() {
                        if self.vars_of(&ty).contains(&f) {
                            let dom = ty.as_arrow().unwrap().0.clone();
                            let arg = self.value(&dom, 0);
                            return Comp::App(Value::Var(f), arg);
                        }
                    }
                }
                4 => {
                    let rho = [EpcfType::Nat, EpcfType::Unit].choose(self.rng).unwrap().clone();
                    let x = self.fresh("x");
                    let body = self.with(&x, rho.clone(), |g| g.comp(t, budget.saturating_sub(1)));
                    let arg = self.value(&rho, 0);
                    return Comp::App(Value::lam(x, rho, body), arg);
                }
                5 | 6 => {
                    if let Some(c) = self.op(t, budget) {
                        return c;
                    }
                }
                7 => {
                    if self.fixes < 2 && self.rng.gen_bool(self.cfg.fix_prob) {
                        self.fixes += 1;
                        return self.recursion(t, budget);
                    }
                }
                _ => return Comp::Return(self.value(t, budget)),
            }
        }
    }

    /// `let g = fix F in g V`, with F either structurally recursive on its
    /// argument or an arbitrary (possibly diverging) body.
    fn recursion(&mut self, t: &EpcfType, budget: usize) -> Comp {
        let fun = nat_to(t.clone());
        let f = self.fresh("f");
        let n = self.fresh("n");
        let body = self.with(&f, fun.clone(), |g| {
            g.with(&n, EpcfType::Nat, |g| {
                if g.rng.gen_bool(0.8) {
                    let m = g.fresh("m");
                    let r = g.fresh("r");
                    let (a, b) = split(g.rng, budget.saturating_sub(3));
                    let base = g.comp(t, a);
                    let step = g.with(&m, EpcfType::Nat, |g| {
                        let rest = g.with(&r, t.clone(), |g| g.comp(t, b));
                        Comp::let_in(Comp::App(Value::var(f.clone()), Value::var(m.clone())), r.clone(), rest)
                    });
                    Comp::case(Value::var(n.clone()), base, m, step)
                } else {
                    g.comp(t, budget.saturating_sub(3))
                }
            })
        });
        let func = Value::lam(f.clone(), fun.clone(), Comp::Return(Value::lam(n, EpcfType::Nat, body)));
        let g = self.fresh("g");
        let arg = self.numeral();
        Comp::let_in(Comp::Fix(func), g.clone(), Comp::App(Value::var(g), arg))
    }

    fn op(&mut self, t: &EpcfType, budget: usize) -> Option<Comp> {
        let normal = self.rng.gen_bool(0.25);
        let (name, shape) = match self.family {
            ObservationFamily::Pure => return None,
            ObservationFamily::Nondet => ("or".to_string(), Shape::Binary),
            ObservationFamily::Prob => ("p-or".to_string(), Shape::Binary),
            ObservationFamily::Io => {
                if self.rng.gen_bool(0.5) {
                    ("read".to_string(), Shape::Input)
                } else {
                    ("write".to_string(), Shape::Output)
                }
            }
            ObservationFamily::Store { locations, .. } => {
                let l = locations.choose(self.rng).unwrap().clone();
                if self.rng.gen_bool(0.5) {
                    (format!("lookup_{l}"), Shape::Input)
                } else {
                    (format!("update_{l}"), Shape::Output)
                }
            }
        };
        let args = match shape {
            Shape::Binary if normal => OpArgs::ParamInf(Value::Zero, self.value(&nat_to(t.clone()), budget)),
            Shape::Binary => {
                let (a, b) = split(self.rng, budget);
                OpArgs::Plain(vec![self.comp(t, a), self.comp(t, b)])
            }
            Shape::Input if normal => OpArgs::ParamInf(Value::Zero, self.cont(t, budget)),
            Shape::Input => OpArgs::Inf(self.cont(t, budget)),
            Shape::Output => {
                let v = self.value(&EpcfType::Nat, 0);
                if normal {
                    OpArgs::ParamInf(v, self.cont(t, budget))
                } else {
                    OpArgs::Param(v, vec![self.comp(t, budget)])
                }
            }
        };
        Some(Comp::Op(name, args))
    }

    fn cont(&mut self, t: &EpcfType, budget: usize) -> Value {
        let x = self.fresh("x");
        let body = self.with(&x, EpcfType::Nat, |g| g.comp(t, budget.saturating_sub(1)));
        Value::lam(x, EpcfType::Nat, body)
    }
}

enum Shape {
    Binary,
    Input,
    Output,
}

fn split<R: Rng>(rng: &mut R, n: usize) -> (usize, usize) {
    if n == 0 {
        return (0, 0);
    }
    let a = rng.gen_range(0..=n);
    (a, n - a)
}

/// A closed computation of type `t` whose size does not exceed the bound.
pub fn gen_comp<R: Rng>(rng: &mut R, family: &ObservationFamily, t: &EpcfType, cfg: &GenConfig) -> Comp {
    loop {
        let target = rng.gen_range(1..=cfg.max_size);
        let mut g = Gen { rng: &mut *rng, family, cfg, env: Vec::new(), counter: 0, fixes: 0 };
        let c = g.comp(t, target / 2 + 1);
        if c.size() <= cfg.max_size {
            return c;
        }
    }
}

/// A closed computation at a randomly chosen small type.
pub fn gen_program<R: Rng>(rng: &mut R, family: &ObservationFamily, cfg: &GenConfig) -> (Comp, EpcfType) {
    let t = small_types().choose(rng).unwrap().clone();
    (gen_comp(rng, family, &t, cfg), t)
}
