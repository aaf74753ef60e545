//! Evaluation settings and their shipped system prompts.

use toolsrv::ToolSetting;

const ZEROSHOT: &str = include_str!("../templates/zeroshot.txt");
const FEWSHOT: &str = include_str!("../templates/fewshot.txt");
const COT: &str = include_str!("../templates/cot.txt");
const THINK: &str = include_str!("../templates/think.txt");
const REVISIT: &str = include_str!("../templates/revisit.txt");
const EXPLORE: &str = include_str!("../templates/explore.txt");
const BOTH: &str = include_str!("../templates/both.txt");

/// One evaluation setting: a system prompt plus the tool set the server
/// must expose. The first three are prompt-only variations over the base
/// tool pair; the rest add tools.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalSetting {
    #[default]
    ZeroShot,
    FewShot,
    Cot,
    Think,
    Revisit,
    Explore,
    Both,
}

impl EvalSetting {
    pub const ALL: [EvalSetting; 7] = [
        EvalSetting::ZeroShot,
        EvalSetting::FewShot,
        EvalSetting::Cot,
        EvalSetting::Think,
        EvalSetting::Revisit,
        EvalSetting::Explore,
        EvalSetting::Both,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EvalSetting::ZeroShot => "zeroshot",
            EvalSetting::FewShot => "fewshot",
            EvalSetting::Cot => "cot",
            EvalSetting::Think => "think",
            EvalSetting::Revisit => "revisit",
            EvalSetting::Explore => "explore",
            EvalSetting::Both => "both",
        }
    }

    pub fn system_prompt(self) -> &'static str {
        match self {
            EvalSetting::ZeroShot => ZEROSHOT,
            EvalSetting::FewShot => FEWSHOT,
            EvalSetting::Cot => COT,
            EvalSetting::Think => THINK,
            EvalSetting::Revisit => REVISIT,
            EvalSetting::Explore => EXPLORE,
            EvalSetting::Both => BOTH,
        }
    }

    /// The tool set a server must be launched with for this setting.
    pub fn tool_setting(self) -> ToolSetting {
        match self {
            EvalSetting::ZeroShot | EvalSetting::FewShot | EvalSetting::Cot => {
                ToolSetting::ZeroShot
            }
            EvalSetting::Think => ToolSetting::Think,
            EvalSetting::Revisit => ToolSetting::Revisit,
            EvalSetting::Explore => ToolSetting::Explore,
            EvalSetting::Both => ToolSetting::ExploreRevisit,
        }
    }
}

impl std::str::FromStr for EvalSetting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zeroshot" => Ok(EvalSetting::ZeroShot),
            "fewshot" => Ok(EvalSetting::FewShot),
            "cot" => Ok(EvalSetting::Cot),
            "think" => Ok(EvalSetting::Think),
            "revisit" => Ok(EvalSetting::Revisit),
            "explore" => Ok(EvalSetting::Explore),
            "both" | "explore-revisit" => Ok(EvalSetting::Both),
            other => Err(format!(
                "unknown setting `{other}` (expected zeroshot, fewshot, cot, think, revisit, explore, or both)"
            )),
        }
    }
}

impl std::fmt::Display for EvalSetting {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_prompt_pins_the_answer_format() {
        for setting in EvalSetting::ALL {
            let prompt = setting.system_prompt();
            assert!(prompt.contains("####"), "{setting} lacks the final marker");
            assert!(
                prompt.contains("****"),
                "{setting} lacks the provisional marker"
            );
            assert!(prompt.contains("I don't know"), "{setting} lacks the opt-out");
        }
    }

    #[test]
    fn prompts_mention_exactly_their_tools() {
        assert!(!EvalSetting::ZeroShot.system_prompt().contains("think_tool"));
        assert!(EvalSetting::Think.system_prompt().contains("think_tool"));
        assert!(!EvalSetting::Think.system_prompt().contains("revisit_topic"));
        assert!(EvalSetting::Revisit.system_prompt().contains("revisit_topic"));
        assert!(EvalSetting::Explore.system_prompt().contains("new_explore_topic"));
        let both = EvalSetting::Both.system_prompt();
        assert!(both.contains("new_explore_topic") && both.contains("revisit_topic"));
    }

    #[test]
    fn names_round_trip_and_tool_sets_line_up() {
        for setting in EvalSetting::ALL {
            assert_eq!(setting.name().parse::<EvalSetting>().unwrap(), setting);
        }
        assert_eq!(EvalSetting::Cot.tool_setting(), ToolSetting::ZeroShot);
        assert_eq!(EvalSetting::Both.tool_setting(), ToolSetting::ExploreRevisit);
    }
}
