//! Agent personas: name, age, gender, and a five-factor trait profile.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::names::NamePool;

pub const AGE_MIN: u32 = 18;
pub const AGE_MAX: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gender {
    Female,
    Male,
}

impl Gender {
    pub fn as_str(self) -> &'static str {
        match self {
            Gender::Female => "female",
            Gender::Male => "male",
        }
    }
}

/// The five personality factors, in canonical storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraitFactor {
    Surgency,
    Agreeableness,
    Conscientiousness,
    EmotionalStability,
    Intellect,
}

impl TraitFactor {
    pub const ALL: [TraitFactor; 5] = [
        TraitFactor::Surgency,
        TraitFactor::Agreeableness,
        TraitFactor::Conscientiousness,
        TraitFactor::EmotionalStability,
        TraitFactor::Intellect,
    ];

    pub fn index(self) -> usize {
        match self {
            TraitFactor::Surgency => 0,
            TraitFactor::Agreeableness => 1,
            TraitFactor::Conscientiousness => 2,
            TraitFactor::EmotionalStability => 3,
            TraitFactor::Intellect => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TraitFactor::Surgency => "surgency",
            TraitFactor::Agreeableness => "agreeableness",
            TraitFactor::Conscientiousness => "conscientiousness",
            TraitFactor::EmotionalStability => "emotional_stability",
            TraitFactor::Intellect => "intellect",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Positive,
    Negative,
}

/// The two printable labels for one factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraitLabels {
    pub positive: &'static str,
    pub negative: &'static str,
}

/// Label vocabulary for all five factors, indexed by storage order.
///
/// The default pairs each factor name (used as its positive pole) with a
/// fixed negative label; swap in a custom vocabulary to rename poles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraitVocabulary {
    pub labels: [TraitLabels; 5],
}

impl Default for TraitVocabulary {
    fn default() -> Self {
        TraitVocabulary {
            labels: [
                TraitLabels {
                    positive: "Surgency",
                    negative: "Unaggressiveness",
                },
                TraitLabels {
                    positive: "Agreeableness",
                    negative: "Distrust",
                },
                TraitLabels {
                    positive: "Conscientiousness",
                    negative: "Indecisiveness",
                },
                TraitLabels {
                    positive: "Emotional stability",
                    negative: "Independence",
                },
                TraitLabels {
                    positive: "Intellect",
                    negative: "Imperceptiveness",
                },
            ],
        }
    }
}

impl TraitVocabulary {
    pub fn label(&self, factor: TraitFactor, polarity: Polarity) -> &'static str {
        let l = &self.labels[factor.index()];
        match polarity {
            Polarity::Positive => l.positive,
            Polarity::Negative => l.negative,
        }
    }
}

/// One sampled trait: its polarity and the label frozen at sampling time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraitSelection {
    pub polarity: Polarity,
    pub label: String,
}

/// Exactly one selection per factor, stored in canonical factor order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraitProfile {
    selections: [TraitSelection; 5],
}

impl TraitProfile {
    /// Build a profile from per-factor polarities using the given vocabulary.
    pub fn from_polarities(polarities: [Polarity; 5], vocab: &TraitVocabulary) -> Self {
        let selections = std::array::from_fn(|i| TraitSelection {
            polarity: polarities[i],
            label: vocab.label(TraitFactor::ALL[i], polarities[i]).to_owned(),
        });
        TraitProfile { selections }
    }

    pub fn get(&self, factor: TraitFactor) -> &TraitSelection {
        &self.selections[factor.index()]
    }

    /// 1 when the factor's positive pole was sampled; regression feature coding.
    pub fn positive_flag(&self, factor: TraitFactor) -> bool {
        self.get(factor).polarity == Polarity::Positive
    }

    pub fn iter(&self) -> impl Iterator<Item = (TraitFactor, &TraitSelection)> {
        TraitFactor::ALL.iter().map(|&f| (f, self.get(f)))
    }
}

/// A static agent identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Persona {
    pub agent_id: u32,
    pub name: String,
    pub age: u32,
    pub gender: Gender,
    pub traits: TraitProfile,
}

/// Sample a persona with the default trait vocabulary.
///
/// Draw order (fixed contract for reproducibility): age, gender, name index,
/// then one polarity coin per factor in canonical order.
pub fn sample_persona(rng: &mut impl Rng, agent_id: u32, pool: &NamePool) -> Persona {
    sample_persona_with(rng, agent_id, pool, &TraitVocabulary::default())
}

/// Sample a persona with a custom trait vocabulary.
pub fn sample_persona_with(
    rng: &mut impl Rng,
    agent_id: u32,
    pool: &NamePool,
    vocab: &TraitVocabulary,
) -> Persona {
    let age = rng.gen_range(AGE_MIN..=AGE_MAX);
    let gender = if rng.gen::<bool>() {
        Gender::Female
    } else {
        Gender::Male
    };
    let names = pool.names(gender);
    let name = names[rng.gen_range(0..names.len())].clone();
    let polarities = std::array::from_fn(|_| {
        if rng.gen::<bool>() {
            Polarity::Positive
        } else {
            Polarity::Negative
        }
    });
    Persona {
        agent_id,
        name,
        age,
        gender,
        traits: TraitProfile::from_polarities(polarities, vocab),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::world_rng;

    #[test]
    fn fixed_seed_gives_identical_personas() {
        let pool = NamePool::bundled();
        let a = sample_persona(&mut world_rng(9), 0, &pool);
        let b = sample_persona(&mut world_rng(9), 0, &pool);
        assert_eq!(a, b);
    }

    #[test]
    fn ages_cover_the_full_range_and_stay_inside() {
        let pool = NamePool::bundled();
        let mut rng = world_rng(123);
        let mut seen = [false; (AGE_MAX - AGE_MIN + 1) as usize];
        for id in 0..10_000 {
            let p = sample_persona(&mut rng, id, &pool);
            assert!(p.age >= AGE_MIN && p.age <= AGE_MAX, "age {}", p.age);
            seen[(p.age - AGE_MIN) as usize] = true;
        }
        assert!(seen.iter().all(|&s| s), "some age in 18..=64 never sampled");
    }

    // Binomial bound: sd of the positive fraction over 10k draws is 0.005,
    // so +/-0.02 is a 4-sigma window per factor.
    #[test]
    fn trait_polarity_is_a_fair_coin_per_factor() {
        let pool = NamePool::bundled();
        let mut rng = world_rng(2024);
        let mut positive = [0u32; 5];
        const N: u32 = 10_000;
        for id in 0..N {
            let p = sample_persona(&mut rng, id, &pool);
            for (f, sel) in p.traits.iter() {
                if sel.polarity == Polarity::Positive {
                    positive[f.index()] += 1;
                }
            }
        }
        for (i, &c) in positive.iter().enumerate() {
            let frac = f64::from(c) / f64::from(N);
            assert!(
                (frac - 0.5).abs() <= 0.02,
                "factor {i}: positive fraction {frac}"
            );
        }
    }

    #[test]
    fn names_match_gender_pool() {
        let pool = NamePool::bundled();
        let mut rng = world_rng(5);
        for id in 0..200 {
            let p = sample_persona(&mut rng, id, &pool);
            assert!(pool.names(p.gender).contains(&p.name));
        }
    }

    #[test]
    fn default_vocabulary_pairs_are_fixed() {
        let v = TraitVocabulary::default();
        assert_eq!(v.label(TraitFactor::Surgency, Polarity::Negative), "Unaggressiveness");
        assert_eq!(v.label(TraitFactor::Agreeableness, Polarity::Negative), "Distrust");
        assert_eq!(v.label(TraitFactor::EmotionalStability, Polarity::Negative), "Independence");
        assert_eq!(v.label(TraitFactor::EmotionalStability, Polarity::Positive), "Emotional stability");
        assert_eq!(v.label(TraitFactor::Intellect, Polarity::Negative), "Imperceptiveness");
    }
}
