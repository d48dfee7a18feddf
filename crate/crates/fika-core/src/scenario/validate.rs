//! Static validation of generated scenarios: reject text that could alter
//! path behavior (overrides, subclassing, anonymous classes) or assert.

use regex::Regex;

/// Named pattern that fails validation when matched.
#[derive(Debug, Clone)]
pub struct ValidationRule {
    pub name: String,
    pub pattern: Regex,
}

impl ValidationRule {
    pub fn new(name: &str, pattern: &str) -> Self {
        ValidationRule {
            name: name.to_string(),
            pattern: Regex::new(pattern).expect("validation rule patterns are written in-crate"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Violation {
    pub rule: String,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Advisory count of mocking-framework tokens; never fails validation.
    pub mock_token_count: usize,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Default rule set. Subclassing and anonymous-class rules are instantiated
/// with the simple names of the path classes when given, and stay generic
/// otherwise.
pub fn default_rules(path_class_simple_names: &[&str]) -> Vec<ValidationRule> {
    let class_alt = if path_class_simple_names.is_empty() {
        r"[A-Za-z_$][\w$]*".to_string()
    } else {
        let escaped: Vec<String> = path_class_simple_names
            .iter()
            .map(|n| regex::escape(n))
            .collect();
        format!("(?:{})", escaped.join("|"))
    };
    vec![
        ValidationRule::new("override-annotation", r"@Override\b"),
        ValidationRule::new(
            "class-extends",
            &format!(r"\bclass\s+[\w$]+\s+extends\s+{class_alt}\b"),
        ),
        ValidationRule::new(
            "anonymous-inner-class",
            &format!(r"\bnew\s+{class_alt}\s*\([^)]*\)\s*\{{"),
        ),
        ValidationRule::new("assertion-directive", r"\bassert\w*\s*\(|\bassert\s"),
    ]
}

fn line_of_offset(text: &str, offset: usize) -> u32 {
    text[..offset].bytes().filter(|&b| b == b'\n').count() as u32 + 1
}

/// Applies every rule to the scenario text and counts mock tokens.
pub fn static_validate(text: &str, rules: &[ValidationRule]) -> ValidationReport {
    let mut violations = Vec::new();
    for rule in rules {
        for m in rule.pattern.find_iter(text) {
            violations.push(Violation {
                rule: rule.name.clone(),
                line: line_of_offset(text, m.start()),
            });
        }
    }
    violations.sort_by(|a, b| (a.line, &a.rule).cmp(&(b.line, &b.rule)));

    let mock_patterns = Regex::new(r"\bMockito\b|\bmock\s*\(|\bwhen\s*\(|@Mock\b")
        .expect("static pattern");
    let mock_token_count = mock_patterns.find_iter(text).count();

    ValidationReport {
        violations,
        mock_token_count,
    }
}

/// Feedback line naming each violated rule, used for the next prompt.
pub fn render_violations(violations: &[Violation]) -> String {
    let parts: Vec<String> = violations
        .iter()
        .map(|v| format!("{} at line {}", v.rule, v.line))
        .collect();
    format!("static validation failed: {}", parts.join(", "))
}
