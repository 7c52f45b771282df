//! Daily prompt construction.
//!
//! The prompt is a single system message with four parts: persona header,
//! fixed bio, the relevant-memories block (which varies by feedback
//! condition), and the question plus response-format instructions. The exact
//! wording is pinned by golden files under `tests/golden/`.

use crate::domain::TraitFactor;

use super::context::DecisionContext;

/// Trait labels are printed in this fixed order, which differs from the
/// canonical storage order; golden files depend on it.
pub const TRAIT_RENDER_ORDER: [TraitFactor; 5] = [
    TraitFactor::Agreeableness,
    TraitFactor::Conscientiousness,
    TraitFactor::Surgency,
    TraitFactor::EmotionalStability,
    TraitFactor::Intellect,
];

/// Render the full daily prompt for one agent.
///
/// Pure and deterministic; ends with a trailing newline.
pub fn build_prompt(ctx: &DecisionContext) -> String {
    let name = &ctx.persona.name;
    let traits = TRAIT_RENDER_ORDER
        .iter()
        .map(|&f| ctx.persona.traits.get(f).label.as_str())
        .collect::<Vec<_>>()
        .join(", ");

    let mut memories = Vec::new();
    if let Some(health) = &ctx.health_sentence {
        memories.push(health.clone());
    }
    if let Some(pct) = ctx.prevalence_pct {
        memories.push(format!(
            "{name} knows about the Catasat virus spreading across the country. \
             It is an infectious disease that spreads from human to human contact \
             via an airborne virus. The deadliness of the virus is unknown. \
             Scientists are warning about a potential epidemic."
        ));
        memories.push(format!(
            "{name} checks the newspaper and finds {pct:.1}% of Dewberry Hollow's \
             population caught new infections of the Catasat virus yesterday."
        ));
    }
    memories.push(format!(
        "{name} goes to work to earn money to support {name}'s self."
    ));
    let memories = memories.join("\n");

    format!(
        "You are {name}. You are {age} years old.\n\
         Your traits are given below:\n\
         {traits}\n\
         \n\
         Your basic bio is below:\n\
         {name} lives in the town of Dewberry Hollow. {name} likes the town and \
         has friends who also live there. {name} has a job and goes to the office \
         for work everyday.\n\
         \n\
         I will provide {name}'s relevant memories here:\n\
         {memories}\n\
         \n\
         Based on the provided memories, should {name} stay at home for the entire \
         day? Please provide your reasoning.\n\
         If the answer is \"Yes,\" please state your reasoning as \"Reasoning: [explanation].\"\n\
         If the answer is \"No,\" please state your reasoning as \"Reasoning: [explanation].\"\n\
         The format should be as follow:\n\
         Reasoning:\n\
         Response:\n\
         Example response format:\n\
         Reasoning: {name} is tired.\n\
         Response: Yes\n\
         It is important to provide Response in a single word.\n",
        age = ctx.persona.age,
    )
}
