//! Tool-set composition per evaluation setting, and the advertised schemas.

use serde_json::json;

use crate::wire::ToolSchema;

/// Canonical tool names.
pub mod tool_names {
    pub const SEARCH_INFORMATION: &str = "search_information";
    pub const NEXT_PAGE: &str = "next_page";
    pub const THINK_TOOL: &str = "think_tool";
    pub const EXPLORE: &str = "explore";
    pub const REVISIT: &str = "revisit";
}

/// Which augmented tools a launch exposes on top of the base
/// `search_information` / `next_page` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ToolSetting {
    #[default]
    ZeroShot,
    Think,
    Explore,
    Revisit,
    ExploreRevisit,
}

impl ToolSetting {
    pub fn name(self) -> &'static str {
        match self {
            ToolSetting::ZeroShot => "zeroshot",
            ToolSetting::Think => "think",
            ToolSetting::Explore => "explore",
            ToolSetting::Revisit => "revisit",
            ToolSetting::ExploreRevisit => "explore-revisit",
        }
    }

    /// Tool names this setting advertises, base tools first.
    pub fn enabled_tools(self) -> Vec<&'static str> {
        let mut tools = vec![tool_names::SEARCH_INFORMATION, tool_names::NEXT_PAGE];
        match self {
            ToolSetting::ZeroShot => {}
            ToolSetting::Think => tools.push(tool_names::THINK_TOOL),
            ToolSetting::Explore => tools.push(tool_names::EXPLORE),
            ToolSetting::Revisit => tools.push(tool_names::REVISIT),
            ToolSetting::ExploreRevisit => {
                tools.push(tool_names::EXPLORE);
                tools.push(tool_names::REVISIT);
            }
        }
        tools
    }

    pub fn is_enabled(self, tool_name: &str) -> bool {
        self.enabled_tools().contains(&tool_name)
    }
}

impl std::str::FromStr for ToolSetting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zeroshot" => Ok(ToolSetting::ZeroShot),
            "think" => Ok(ToolSetting::Think),
            "explore" => Ok(ToolSetting::Explore),
            "revisit" => Ok(ToolSetting::Revisit),
            "explore-revisit" | "both" => Ok(ToolSetting::ExploreRevisit),
            other => Err(format!(
                "unknown tool setting `{other}` (expected zeroshot, think, explore, revisit, or explore-revisit)"
            )),
        }
    }
}

/// Schemas for every tool the setting enables, in the order of
/// [`ToolSetting::enabled_tools`].
pub fn tool_schemas(setting: ToolSetting) -> Vec<ToolSchema> {
    setting.enabled_tools().into_iter().map(schema_for).collect()
}

fn schema_for(tool_name: &str) -> ToolSchema {
    let (description, parameters) = match tool_name {
        tool_names::SEARCH_INFORMATION => (
            "Input a query to search for up to 5 relevant documents.",
            json!({
                "type": "object",
                "properties": {
                    "query": {
                        "type": "string",
                        "description": "Keywords or a sentence describing the missing information."
                    }
                },
                "required": ["query"]
            }),
        ),
        tool_names::NEXT_PAGE => (
            "Get the next 5 results for the last search.",
            json!({
                "type": "object",
                "properties": {},
                "required": []
            }),
        ),
        tool_names::THINK_TOOL => (
            "For reflection, calculation, and strategic planning; echoes the thought back.",
            json!({
                "type": "object",
                "properties": {
                    "thought": {
                        "type": "string",
                        "description": "The reflection or plan to record."
                    }
                },
                "required": ["thought"]
            }),
        ),
        tool_names::EXPLORE => (
            "Explore a completely new research topic.",
            json!({
                "type": "object",
                "properties": {
                    "new_explore_topic": {
                        "type": "string",
                        "description": "The related term(s) or area to explore."
                    },
                    "reasoning": {
                        "type": "string",
                        "description": "Why exploring is better."
                    },
                    "query": {
                        "type": "string",
                        "description": "Specific search terms for the new topic."
                    }
                },
                "required": ["new_explore_topic", "reasoning", "query"]
            }),
        ),
        tool_names::REVISIT => (
            "Revisit a previous search topic with a refined plan.",
            json!({
                "type": "object",
                "properties": {
                    "revisit_topic": {
                        "type": "string",
                        "description": "The prior area to revisit."
                    },
                    "reasoning": {
                        "type": "string",
                        "description": "Why returning now is better."
                    },
                    "new_query": {
                        "type": "string",
                        "description": "Refined query."
                    }
                },
                "required": ["revisit_topic", "reasoning", "new_query"]
            }),
        ),
        other => unreachable!("no schema for tool `{other}`"),
    };
    ToolSchema {
        name: tool_name.to_string(),
        description: description.to_string(),
        parameters,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeroshot_advertises_only_the_base_pair() {
        assert_eq!(
            ToolSetting::ZeroShot.enabled_tools(),
            vec!["search_information", "next_page"]
        );
    }

    #[test]
    fn every_setting_keeps_the_base_pair_and_adds_its_tools() {
        for (setting, extra) in [
            (ToolSetting::Think, vec!["think_tool"]),
            (ToolSetting::Explore, vec!["explore"]),
            (ToolSetting::Revisit, vec!["revisit"]),
            (ToolSetting::ExploreRevisit, vec!["explore", "revisit"]),
        ] {
            let tools = setting.enabled_tools();
            assert_eq!(&tools[..2], &["search_information", "next_page"]);
            assert_eq!(&tools[2..], extra.as_slice(), "{}", setting.name());
        }
    }

    #[test]
    fn schemas_use_the_documented_argument_names() {
        let schemas = tool_schemas(ToolSetting::ExploreRevisit);
        let args_of = |name: &str| -> Vec<String> {
            let schema = schemas.iter().find(|s| s.name == name).unwrap();
            schema.parameters["required"]
                .as_array()
                .unwrap()
                .iter()
                .map(|v| v.as_str().unwrap().to_string())
                .collect()
        };
        assert_eq!(args_of("search_information"), ["query"]);
        assert_eq!(args_of("next_page"), [""; 0]);
        assert_eq!(
            args_of("explore"),
            ["new_explore_topic", "reasoning", "query"]
        );
        assert_eq!(args_of("revisit"), ["revisit_topic", "reasoning", "new_query"]);
        let think = tool_schemas(ToolSetting::Think);
        assert_eq!(
            think.iter().map(|s| s.name.as_str()).collect::<Vec<_>>(),
            ["search_information", "next_page", "think_tool"]
        );
        assert_eq!(think[2].parameters["required"][0], "thought");
    }

    #[test]
    fn setting_names_round_trip() {
        for setting in [
            ToolSetting::ZeroShot,
            ToolSetting::Think,
            ToolSetting::Explore,
            ToolSetting::Revisit,
            ToolSetting::ExploreRevisit,
        ] {
            assert_eq!(setting.name().parse::<ToolSetting>().unwrap(), setting);
        }
        assert_eq!("both".parse::<ToolSetting>().unwrap(), ToolSetting::ExploreRevisit);
        assert!("cot".parse::<ToolSetting>().is_err());
    }
}
