//! Named preset configurations. Each preset is a complete TOML config; the
//! CLI expands it and writes the expanded form next to the outputs so every
//! run is reproducible from its artifacts alone.

use crate::config::RunConfig;
use crate::error::QbError;

pub(crate) static PRESETS: &[(&str, &str)] = &[
    (
        "qtrap-welfare",
        r#"
[environment]
kind = "decision"
y = -0.5
x = 1.0
initial_state = 2

[agents]
alpha = 0.1
epsilon = 0.1
delta = 0.95
alpha_list = [0.1, 0.3, 0.5]
epsilon_list = [0.1, 0.2, 0.3, 0.4]

[simulation]
horizon = 100000
paths = 30
seed = 101
initial_q = [[0.9, 1.0]]
window = { last = 80000 }
"#,
    ),
    (
        "qtrap-welfare-y05",
        r#"
[environment]
kind = "decision"
y = 0.5
x = 1.0
initial_state = 2

[agents]
alpha = 0.1
epsilon = 0.1
delta = 0.95
alpha_list = [0.1, 0.3, 0.5]
epsilon_list = [0.1, 0.2, 0.3, 0.4]

[simulation]
horizon = 100000
paths = 30
seed = 102
initial_q = [[0.9, 1.0]]
window = { last = 80000 }
"#,
    ),
    (
        "qtrap-welfare-x25",
        r#"
[environment]
kind = "decision"
y = 0.5
x = 2.5
initial_state = 2

[agents]
alpha = 0.1
epsilon = 0.1
delta = 0.95
alpha_list = [0.1, 0.3, 0.5]
epsilon_list = [0.1, 0.2, 0.3, 0.4]

[simulation]
horizon = 100000
paths = 30
seed = 103
initial_q = [[0.9, 1.0]]
window = { last = 80000 }
"#,
    ),
    (
        "pd-welfare",
        r#"
[environment]
kind = "pd"
x = 2.5
y = -0.5

[agents]
alpha = 0.5
epsilon = 0.1
delta = 0.95
alpha_list = [0.1, 0.3, 0.5]
epsilon_list = [0.025, 0.05, 0.075, 0.1, 0.125, 0.15, 0.175, 0.2]

[simulation]
horizon = 10000
paths = 90
seed = 104
initial_q = [[0.95, 1.0], [0.95, 1.0]]
"#,
    ),
    (
        "pd-bias",
        r#"
[environment]
kind = "pd"
x = 2.5
y = -0.5

[agents]
alpha = 0.5
epsilon = 0.1
delta = 0.95
bias_grid = { increment = 0.02, kappa_min = 0, kappa_max = 4 }

[simulation]
horizon = 10000
paths = 90
seed = 105
initial_q = [[0.95, 1.0], [0.95, 1.0]]
"#,
    ),
    (
        "pd-bias-long",
        r#"
[environment]
kind = "pd"
x = 2.5
y = -0.5

[agents]
alpha = 0.5
epsilon = 0.1
delta = 0.95
bias_grid = { increment = 0.02, kappa_min = -1, kappa_max = 4 }

[simulation]
horizon = 100000
paths = 90
seed = 106
initial_q = [[0.95, 1.0], [0.95, 1.0]]
"#,
    ),
    (
        "pd-bias-alpha02",
        r#"
[environment]
kind = "pd"
x = 2.5
y = -0.5

[agents]
alpha = 0.2
epsilon = 0.1
delta = 0.95
bias_grid = { increment = 0.02, kappa_min = 0, kappa_max = 4 }

[simulation]
horizon = 100000
paths = 90
seed = 107
initial_q = [[0.95, 1.0], [0.95, 1.0]]
"#,
    ),
    (
        "pd-bias-alpha01",
        r#"
[environment]
kind = "pd"
x = 2.5
y = -0.5

[agents]
alpha = 0.1
epsilon = 0.1
delta = 0.95
bias_grid = { increment = 0.02, kappa_min = -1, kappa_max = 4 }

[simulation]
horizon = 100000
paths = 90
seed = 108
initial_q = [[0.95, 1.0], [0.95, 1.0]]
"#,
    ),
    (
        "pd-bias-y05",
        r#"
[environment]
kind = "pd"
x = 2.5
y = 0.5

[agents]
alpha = 0.5
epsilon = 0.1
delta = 0.95
bias_grid = { increment = 0.02, kappa_min = -1, kappa_max = 3 }

[simulation]
horizon = 10000
paths = 90
seed = 109
initial_q = [[0.95, 1.0], [0.95, 1.0]]
"#,
    ),
    (
        "pd-bias-y05-long",
        r#"
[environment]
kind = "pd"
x = 2.5
y = 0.5

[agents]
alpha = 0.5
epsilon = 0.1
delta = 0.95
bias_grid = { increment = 0.02, kappa_min = -1, kappa_max = 3 }

[simulation]
horizon = 100000
paths = 90
seed = 110
initial_q = [[0.95, 1.0], [0.95, 1.0]]
"#,
    ),
    (
        "pd-stochastic-correlated",
        r#"
[environment]
kind = "pd"
x = 2.5
y = 0.0
channel = "correlated"
v = 5.0

[agents]
alpha = 0.1
epsilon = 0.05
delta = 0.95
epsilon_list = [0.05, 0.1, 0.15, 0.2, 0.25]

[simulation]
horizon = 200000
paths = 30
seed = 111
initial_q = [[0.95, 1.0], [0.95, 1.0]]
"#,
    ),
    (
        "pd-stochastic-independent",
        r#"
[environment]
kind = "pd"
x = 2.5
y = 0.0
channel = "independent"
v = 5.0

[agents]
alpha = 0.1
epsilon = 0.05
delta = 0.95
epsilon_list = [0.05, 0.1, 0.15, 0.2, 0.25]

[simulation]
horizon = 200000
paths = 30
seed = 112
initial_q = [[0.95, 1.0], [0.95, 1.0]]
"#,
    ),
    (
        "pd-stochastic-bias-correlated",
        r#"
[environment]
kind = "pd"
x = 2.5
y = 0.0
channel = "correlated"
v = 5.0

[agents]
alpha = 0.1
epsilon = 0.1
delta = 0.95
bias_grid = { increment = 0.02, kappa_min = 0, kappa_max = 6 }

[simulation]
horizon = 10000
paths = 90
seed = 113
initial_q = [[0.95, 1.0], [0.95, 1.0]]
"#,
    ),
    (
        "pd-stochastic-bias-independent",
        r#"
[environment]
kind = "pd"
x = 2.5
y = 0.0
channel = "independent"
v = 5.0

[agents]
alpha = 0.1
epsilon = 0.1
delta = 0.95
bias_grid = { increment = 0.02, kappa_min = 0, kappa_max = 6 }

[simulation]
horizon = 10000
paths = 90
seed = 114
initial_q = [[0.95, 1.0], [0.95, 1.0]]
"#,
    ),
    (
        "pd-coop-duration-correlated",
        r#"
[environment]
kind = "pd"
x = 2.5
y = 0.0
channel = "correlated"
v = 5.0

[agents]
alpha = 0.1
epsilon = 0.1
delta = 0.95

[simulation]
horizon = 10000
paths = 25
seed = 115
initial_q = [[1.5, 1.4], [1.5, 1.4]]
"#,
    ),
    (
        "pd-coop-duration-independent",
        r#"
[environment]
kind = "pd"
x = 2.5
y = 0.0
channel = "independent"
v = 5.0

[agents]
alpha = 0.1
epsilon = 0.1
delta = 0.95

[simulation]
horizon = 10000
paths = 25
seed = 116
initial_q = [[1.5, 1.4], [1.5, 1.4]]
"#,
    ),
    (
        "pd-defect-duration-correlated",
        r#"
[environment]
kind = "pd"
x = 2.5
y = 0.0
channel = "correlated"
v = 5.0

[agents]
alpha = 0.1
epsilon = 0.1
delta = 0.95

[simulation]
horizon = 10000
paths = 25
seed = 117
initial_q = [[1.2, 1.25], [1.2, 1.25]]
"#,
    ),
    (
        "pd-defect-duration-independent",
        r#"
[environment]
kind = "pd"
x = 2.5
y = 0.0
channel = "independent"
v = 5.0

[agents]
alpha = 0.1
epsilon = 0.1
delta = 0.95

[simulation]
horizon = 10000
paths = 25
seed = 118
initial_q = [[1.2, 1.25], [1.2, 1.25]]
"#,
    ),
    (
        "pd-fk-correlated",
        r#"
[environment]
kind = "pd"
x = 2.5
y = 0.0
channel = "correlated"
v = 5.0

[agents]
alpha = 0.1
epsilon = 0.1
delta = 0.95

[simulation]
horizon = 200000
paths = 1
seed = 119
initial_q = [[1.5, 1.4], [1.5, 1.4]]
trace = "full"

[output]
fk_curve = true
"#,
    ),
    (
        "pd-fk-independent",
        r#"
[environment]
kind = "pd"
x = 2.5
y = 0.0
channel = "independent"
v = 5.0

[agents]
alpha = 0.1
epsilon = 0.1
delta = 0.95

[simulation]
horizon = 200000
paths = 1
seed = 120
initial_q = [[1.5, 1.4], [1.5, 1.4]]
trace = "full"

[output]
fk_curve = true
"#,
    ),
    (
        "pd-fk-deterministic",
        r#"
[environment]
kind = "pd"
x = 2.5
y = 0.0

[agents]
alpha = 0.1
epsilon = 0.1
delta = 0.95

[simulation]
horizon = 200000
paths = 1
seed = 121
initial_q = [[1.5, 1.4], [1.5, 1.4]]
trace = "full"

[output]
fk_curve = true
"#,
    ),
    (
        "duopoly-naive",
        r#"
[environment]
kind = "duopoly"

[agents]
alpha = 0.1
epsilon = 0.1
delta = 0.95

[simulation]
horizon = 100000
paths = 8
seed = 122
initial_q = [
    [2.0, 1.8, 1.8, 1.8, 1.8, 1.8, 1.8],
    [2.0, 1.8, 1.8, 1.8, 1.8, 1.8, 1.8],
]
"#,
    ),
    (
        "duopoly-bias",
        r#"
[environment]
kind = "duopoly"

[agents]
alpha = 0.1
epsilon = 0.1
delta = 0.95
bias_grid = { increment = 0.01, kappa_min = 0, kappa_max = 5 }

[simulation]
horizon = 100000
paths = 8
seed = 123
initial_q = [
    [2.0, 1.8, 1.8, 1.8, 1.8, 1.8, 1.8],
    [2.0, 1.8, 1.8, 1.8, 1.8, 1.8, 1.8],
]
"#,
    ),
    (
        "duopoly-bias-window",
        r#"
[environment]
kind = "duopoly"

[agents]
alpha = 0.1
epsilon = 0.1
delta = 0.95
bias_grid = { increment = 0.01, kappa_min = 0, kappa_max = 5 }

[simulation]
horizon = 100000
paths = 8
seed = 124
initial_q = [
    [2.0, 1.8, 1.8, 1.8, 1.8, 1.8, 1.8],
    [2.0, 1.8, 1.8, 1.8, 1.8, 1.8, 1.8],
]
window = { last = 80000 }
"#,
    ),
    (
        "trace-qtrap",
        r#"
[environment]
kind = "decision"
y = -0.5
x = 1.0
initial_state = 1

[agents]
alpha = 0.1
epsilon = 0.1
delta = 0.95

[simulation]
horizon = 10000
paths = 1
seed = 125
initial_q = [[1.5, 1.4]]
trace = "full"
"#,
    ),
    (
        "trace-qtrap-high",
        r#"
[environment]
kind = "decision"
y = -0.5
x = 1.0
initial_state = 1

[agents]
alpha = 0.3
epsilon = 0.3
delta = 0.95

[simulation]
horizon = 10000
paths = 1
seed = 126
initial_q = [[1.5, 1.4]]
trace = "full"
"#,
    ),
    (
        "trace-qtrap-x25",
        r#"
[environment]
kind = "decision"
y = 0.5
x = 2.5
initial_state = 1

[agents]
alpha = 0.1
epsilon = 0.1
delta = 0.95

[simulation]
horizon = 10000
paths = 1
seed = 127
initial_q = [[1.5, 1.4]]
trace = "full"
"#,
    ),
    (
        "trace-pd",
        r#"
[environment]
kind = "pd"
x = 2.5
y = -0.5

[agents]
alpha = 0.5
epsilon = 0.1
delta = 0.95

[simulation]
horizon = 10000
paths = 1
seed = 128
initial_q = [[0.95, 1.0], [0.95, 1.0]]
trace = "full"
"#,
    ),
    (
        "trace-pd-bias",
        r#"
[environment]
kind = "pd"
x = 2.5
y = -0.5

[agents]
alpha = 0.5
epsilon = 0.1
delta = 0.95
biases = [0.04, 0.04]

[simulation]
horizon = 10000
paths = 1
seed = 129
initial_q = [[0.95, 1.0], [0.95, 1.0]]
trace = "full"
"#,
    ),
    (
        "trace-pd-stochastic-correlated",
        r#"
[environment]
kind = "pd"
x = 2.5
y = 0.0
channel = "correlated"
v = 5.0

[agents]
alpha = 0.1
epsilon = 0.1
delta = 0.95

[simulation]
horizon = 10000
paths = 1
seed = 130
initial_q = [[1.5, 1.4], [1.5, 1.4]]
trace = "full"
"#,
    ),
    (
        "trace-pd-stochastic-independent",
        r#"
[environment]
kind = "pd"
x = 2.5
y = 0.0
channel = "independent"
v = 5.0

[agents]
alpha = 0.1
epsilon = 0.1
delta = 0.95

[simulation]
horizon = 10000
paths = 1
seed = 131
initial_q = [[1.5, 1.4], [1.5, 1.4]]
trace = "full"
"#,
    ),
    (
        "trace-duopoly-naive",
        r#"
[environment]
kind = "duopoly"

[agents]
alpha = 0.1
epsilon = 0.1
delta = 0.95

[simulation]
horizon = 100000
paths = 1
seed = 132
initial_q = [
    [2.0, 1.8, 1.8, 1.8, 1.8, 1.8, 1.8],
    [2.0, 1.8, 1.8, 1.8, 1.8, 1.8, 1.8],
]
trace = "full"

[output]
stride = 10
"#,
    ),
    (
        "trace-duopoly-bias",
        r#"
[environment]
kind = "duopoly"

[agents]
alpha = 0.1
epsilon = 0.1
delta = 0.95
biases = [0.03, 0.03]

[simulation]
horizon = 100000
paths = 1
seed = 133
initial_q = [
    [2.0, 1.8, 1.8, 1.8, 1.8, 1.8, 1.8],
    [2.0, 1.8, 1.8, 1.8, 1.8, 1.8, 1.8],
]
trace = "full"

[output]
stride = 10
"#,
    ),
];

/// Names of all built-in presets, in listing order.
pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(name, _)| *name).collect()
}

/// Loads a preset by name.
pub fn preset(name: &str) -> Result<RunConfig, QbError> {
    let text = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| QbError::UnknownPreset(name.to_string()))?;
    RunConfig::from_toml(text)
}
