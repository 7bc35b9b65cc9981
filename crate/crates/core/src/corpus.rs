//! Built-in statement fixtures.
//!
//! Includes the α-renamed pair `t1`/`t2`, a shadowing λ-term, the
//! label/prediction pairs of `exercise_1_3_8`, the irreducible polynomial
//! and `mathd_numbertheory_254` (with its two transfer proofs), plus a
//! spread of ordinary statements covering every operator and binder form.

use crate::opt::{build_opt, OperatorTree};
use crate::parser::{parse_theorem, ParseError};
use crate::standardize::{standardize, StandardizeConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fixture {
    pub id: &'static str,
    pub source: &'static str,
}

const fn fx(id: &'static str, source: &'static str) -> Fixture {
    Fixture { id, source }
}

pub const FIXTURES: &[Fixture] = &[
    fx("alpha-t1", "theorem t1 (x : Nat) : P x := by sorry"),
    fx("alpha-t2", "theorem t2 (y : Nat) : P y := by sorry"),
    fx("shadowing", "theorem thm : (λ x, (λ x, x) y z) = z"),
    fx(
        "perm-label",
        "theorem thm_P : Infinite (Equiv.Perm ℕ) := by sorry",
    ),
    fx(
        "perm-pred",
        "theorem thm_Q : {Ω : Type u_1} [Infinite Ω] : Infinite (Equiv.Perm Ω) := by sorry",
    ),
    fx("defeq-check", "example : thm_P = thm_Q := by rfl"),
    fx(
        "poly-label",
        "theorem thm_P : Irreducible  (X^4 + 4*X^3 + 6*X^2 + 2*X + 1 : Polynomial ℤ) := by sorry",
    ),
    fx(
        "poly-pred",
        "theorem thm_Q : Irreducible (wilsons_poly : ℤ[X]) := by sorry",
    ),
    fx(
        "marbles-label",
        "theorem thm_P : (239 + 174 + 83) % 10 = 6 := by sorry",
    ),
    fx(
        "marbles-pred",
        "theorem thm_Q (s w z : ℕ) : (239 + 174 + 83) % 10 = 6 := by sorry",
    ),
    fx(
        "marbles-forward",
        "theorem thm_Q (s w z : ℕ) : (239 + 174 + 83) % 10 = 6 := by\n  exact thm_P",
    ),
    fx(
        "marbles-backward",
        "theorem thm_P : (239 + 174 + 83) % 10 = 6 := by\n  exact thm_Q 239 174 83",
    ),
    fx("fn-fixed", "theorem thm (f : ℝ → ℝ) : ∀ x, f x = x"),
    fx(
        "fn-pair",
        "theorem thm (f g : ℝ → ℝ) (h : ∀ x, f x = g x) : f = g",
    ),
    fx("add-zero", "theorem thm : ∀ n : ℕ, n + 0 = n"),
    fx("add-comm", "theorem thm (a b : ℤ) : a + b = b + a"),
    fx(
        "mul-assoc",
        "lemma mul_assoc' (a b c : ℚ) : a * b * c = a * (b * c)",
    ),
    fx(
        "pow-chain",
        "theorem thm (x : ℝ) (h₀ : 0 < x) : x ^ 2 ^ 3 = (x ^ 2) ^ 3 → x = 1",
    ),
    fx("exists-lt", "theorem thm : ∃ x y : ℕ, x < y ∧ ¬ (x = 0)"),
    fx("divides", "theorem thm (n : ℕ) (h : 3 ∣ n) : 3 ∣ n * n"),
    fx(
        "membership",
        "theorem thm {α : Type} (s : Set α) (a : α) (h : a ∈ s) : a ∈ s ∨ False",
    ),
    fx(
        "iff-chain",
        "theorem thm (p q r : Prop) : (p ↔ q) ↔ (q ↔ p) ∧ r ∨ ¬ r",
    ),
    fx(
        "ascii-ops",
        "theorem thm (a b : ℕ) (h : a <= b) : a != b + 1 -> b >= a",
    ),
    fx(
        "unary-minus",
        "theorem thm (x : ℤ) : -x * -(3) = 3 * x - 0 / 2",
    ),
    fx(
        "instance-binder",
        "theorem thm {G : Type} [Group G] (a : G) : a * a⁻¹ = 1",
    ),
    fx("lambda-eq", "theorem thm : (fun x : ℕ => x + 1) 2 = 3"),
    fx(
        "nested-forall",
        "theorem thm : ∀ ε : ℝ, ε > 0 → ∃ δ : ℝ, δ > 0 ∧ ∀ x, abs x < δ → abs (f x) < ε",
    ),
    fx(
        "ne-sub",
        "theorem thm (a b : ℝ) (hab : a ≠ b) : (a - b) ^ 2 > 0",
    ),
    fx("index", "theorem thm (l : List ℕ) (i : ℕ) : l[i] ≤ l.sum"),
    fx(
        "mod-arith",
        "theorem thm : (2 ^ 2010) % 10 = 4 := by norm_num",
    ),
];

pub fn find(id: &str) -> Option<&'static Fixture> {
    FIXTURES.iter().find(|f| f.id == id)
}

/// Parse, standardize with `config`, and build the operator tree.
pub fn tree_of(source: &str, config: &StandardizeConfig) -> Result<OperatorTree, ParseError> {
    Ok(build_opt(&standardize(parse_theorem(source)?, config)))
}

/// Operator trees of every fixture under the default configuration.
pub fn fixture_trees() -> Vec<(&'static str, OperatorTree)> {
    FIXTURES
        .iter()
        .map(|f| {
            let tree = tree_of(f.source, &StandardizeConfig::default())
                .unwrap_or_else(|e| panic!("fixture {} does not parse: {e}", f.id));
            (f.id, tree)
        })
        .collect()
}
