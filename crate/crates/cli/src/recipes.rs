//! Bundled scenario documents, one per figure.

use crate::config::{parse_config, ConfigError, ScenarioConfig, Strictness};

pub struct Recipe {
    pub name: &'static str,
    pub summary: &'static str,
    pub text: &'static str,
}

pub const RECIPES: &[Recipe] = &[
    Recipe {
        name: "fig2",
        summary: "ICSRS vs quantum-core attenuation at 50 km",
        text: include_str!("../recipes/fig2.toml"),
    },
    Recipe {
        name: "fig3",
        summary: "ICSRS vs coupling coefficient at 50 km",
        text: include_str!("../recipes/fig3.toml"),
    },
    Recipe {
        name: "fig4",
        summary: "forward/backward ICSRS vs length, with forward peak",
        text: include_str!("../recipes/fig4.toml"),
    },
    Recipe {
        name: "fig5",
        summary: "key rate and QBER vs length at 10 dBm, with max distances",
        text: include_str!("../recipes/fig5.toml"),
    },
    Recipe {
        name: "fig6",
        summary: "key rate and QBER at 40 km vs power of 16 channels",
        text: include_str!("../recipes/fig6.toml"),
    },
    Recipe {
        name: "fig7",
        summary: "single-core SRS vs length, with closed-form peak",
        text: include_str!("../recipes/fig7.toml"),
    },
];

pub fn find(name: &str) -> Option<&'static Recipe> {
    RECIPES.iter().find(|r| r.name == name)
}

impl Recipe {
    pub fn load(&self, strictness: Strictness) -> Result<ScenarioConfig, ConfigError> {
        parse_config(self.text, self.name, None, strictness)
    }
}
