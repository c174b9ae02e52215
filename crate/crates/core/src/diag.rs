//! Positioned diagnostics shared by the parser, the analyses and the simulator.

use std::fmt;

use crate::model::ElementId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "ERROR",
            Severity::Warning => "WARNING",
        }
    }
}

macro_rules! codes {
    ($($variant:ident => $text:literal,)*) => {
        /// Machine-readable diagnostic code. `W_` codes are warnings.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum Code {
            $($variant,)*
        }

        impl Code {
            pub fn as_str(self) -> &'static str {
                match self {
                    $(Code::$variant => $text,)*
                }
            }
        }
    };
}

codes! {
    Syntax => "E_SYNTAX",
    UnresolvedName => "E_UNRESOLVED_NAME",
    DupEvent => "E_DUP_EVENT",
    DupName => "E_DUP_NAME",
    UnknownId => "E_UNKNOWN_ID",
    Closure => "E_CLOSURE",
    ModelMismatch => "E_MODEL_MISMATCH",
    DanglingArc => "E_DANGLING_ARC",
    SelfLoop => "E_SELF_LOOP",
    StageOrder => "E_STAGE_ORDER",
    TriggerSameMachine => "E_TRIGGER_SAME_MACHINE",
    BarMalformed => "E_BAR_MALFORMED",
    NestingCycle => "E_NESTING_CYCLE",
    UnknownEvent => "E_UNKNOWN_EVENT",
    ExclusiveSame => "E_EXCLUSIVE_SAME",
    SelfExclusive => "W_SELF_EXCLUSIVE",
    EdgeUnsupported => "E_EDGE_UNSUPPORTED",
    Cycle => "E_CYCLE",
    JoinConflict => "E_JOIN_CONFLICT",
    Exclusivity => "E_EXCLUSIVITY",
    UnresolvedChoice => "E_UNRESOLVED_CHOICE",
    Horizon => "W_HORIZON",
    NegNoop => "W_NEG_NOOP",
    NegUnbound => "W_NEG_UNBOUND",
    TraceMismatch => "E_TRACE_MISMATCH",
    UnknownScenario => "E_UNKNOWN_SCENARIO",
}

impl Code {
    pub fn severity(self) -> Severity {
        if self.as_str().starts_with("W_") {
            Severity::Warning
        } else {
            Severity::Error
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// 1-based line and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Position {
    pub line: u32,
    pub col: u32,
}

impl Position {
    pub fn new(line: u32, col: u32) -> Self {
        Position { line, col }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: Code,
    pub severity: Severity,
    pub message: String,
    pub element: Option<ElementId>,
    pub position: Option<Position>,
}

impl Diagnostic {
    /// Severity follows the code.
    pub fn new(code: Code, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            severity: code.severity(),
            message: message.into(),
            element: None,
            position: None,
        }
    }

    pub fn at(mut self, position: Position) -> Self {
        self.position = Some(position);
        self
    }

    pub fn at_opt(mut self, position: Option<Position>) -> Self {
        self.position = position;
        self
    }

    pub fn on(mut self, element: ElementId) -> Self {
        self.element = Some(element);
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// `SEVERITY CODE file:line:col message`; `0:0` when no position is known.
    pub fn render(&self, file: &str) -> String {
        let pos = self.position.unwrap_or_default();
        format!(
            "{} {} {}:{} {}",
            self.severity.as_str(),
            self.code,
            file,
            pos,
            self.message
        )
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", self.severity.as_str(), self.code, self.message)
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}
