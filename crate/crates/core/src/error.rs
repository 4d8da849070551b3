use std::collections::BTreeMap;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Side-by-side dimension tables carried by comparison failures.
/// Keys are `"weight:degree"` or `"degree"` strings.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TablePair {
    pub left_name: String,
    pub left: BTreeMap<String, usize>,
    pub right_name: String,
    pub right: BTreeMap<String, usize>,
}

impl std::fmt::Display for TablePair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let keys: std::collections::BTreeSet<&String> = self.left.keys().chain(self.right.keys()).collect();
        for k in keys {
            let l = self.left.get(k).copied().unwrap_or(0);
            let r = self.right.get(k).copied().unwrap_or(0);
            if l != r {
                writeln!(f, "  {k}: {}={l} {}={r}", self.left_name, self.right_name)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("composition of consecutive maps is nonzero ({context})")]
    CompositionNonzero { context: String },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("degree {degree} needs inputs outside the truncation window ({context})")]
    WindowOverflow { degree: i64, context: String },

    #[error("{operation} needs inverses of integers that vanish in characteristic {characteristic}")]
    CharacteristicUnsupported { operation: String, characteristic: u64 },

    #[error("algebra carries no connectivity certificate; {operation} would not be degreewise finite")]
    CertificateMissing { operation: String },

    #[error("claimed certificate {claimed} does not hold: {reason}")]
    CertificateRejected { claimed: String, reason: String },

    #[error("filtration cap {cap} exceeded: {context}")]
    CapExceeded { cap: usize, context: String },

    #[error("indecomposables are not an exact model of the cotangent space for {0}")]
    ModelNotExact(String),

    #[error("layer {layer}: cyclic bar associated graded disagrees with the configuration model\n{tables}")]
    LayerMismatch { layer: usize, tables: TablePair },

    #[error("free calculation disagrees with Hochschild homology of the free algebra\n{tables}")]
    FreeCalcMismatch { tables: TablePair },

    #[error("parse error at {location}: {message}")]
    ParseError { location: String, message: String },

    #[error("validation failed: {0}")]
    ValidationError(String),

    #[error("differential does not square to zero: {0}")]
    NotAComplex(String),

    #[error("unsupported field {0}")]
    UnsupportedField(String),

    #[error("basis of the maximal ideal is not adapted to its power filtration: {0}")]
    NotAdapted(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Error::CompositionNonzero { .. } => "composition-nonzero",
            Error::ShapeMismatch(_) => "shape-mismatch",
            Error::WindowOverflow { .. } => "window-overflow",
            Error::CharacteristicUnsupported { .. } => "characteristic-unsupported",
            Error::CertificateMissing { .. } => "certificate-missing",
            Error::CertificateRejected { .. } => "certificate-rejected",
            Error::CapExceeded { .. } => "cap-exceeded",
            Error::ModelNotExact(_) => "model-not-exact",
            Error::LayerMismatch { .. } => "layer-mismatch",
            Error::FreeCalcMismatch { .. } => "free-calc-mismatch",
            Error::ParseError { .. } => "parse-error",
            Error::ValidationError(_) => "validation-error",
            Error::NotAComplex(_) => "not-a-complex",
            Error::UnsupportedField(_) => "unsupported-field",
            Error::NotAdapted(_) => "not-adapted",
            Error::InvalidInput(_) => "invalid-input",
            Error::Io(_) => "io",
        }
    }

    /// Mismatch errors map to exit status 2, everything else to 1.
    pub fn is_mismatch(&self) -> bool {
        matches!(self, Error::LayerMismatch { .. } | Error::FreeCalcMismatch { .. })
    }
}
