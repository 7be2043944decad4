#include "hibarrier/catalog.hpp"

#include <array>
#include <stdexcept>

namespace hibarrier::catalog {

namespace {

constexpr std::string_view kExp1 = R"json({
  "name": "exp1",
  "dim": 2,
  "params": 1,
  "C": {"all": ["-x2", "x1 - 1", "-x1 - 1"]},
  "D": {"all": ["x2", {"leaf": "x1^2 + x2^2 - 1", "strict": true}]},
  "F": ["-x2^2", "x2*x1 - x2*(2 + 2*p1 - (x1^2 + x2^2))"],
  "G": ["0", "p1*abs(x1)"],
  "barrier": ["x1^2 + x2^2 - 1", "-x2"],
  "box": {"lo": [-1.5, -1.5], "hi": [1.5, 1.5]},
  "expected": {
    "checks": [{"theorem": "thm1", "status": "NoViolationFound"}],
    "falsify": [{"mode": "invariance", "result": "none", "budget": 30, "T": 3, "J": 5}],
    "notes": ["G is taken as (0, p1*|x1|) with p1 in [0,1], not as the box [0,x2] x [0,|x1|]; the jump condition holds for the former."]
  }
}
)json";

constexpr std::string_view kThermostat = R"json({
  "name": "thermostat",
  "dim": 2,
  "constants": {"zo": 0, "zdelta": 2, "zmin": 0.5, "zmax": 1.5},
  "C": {"any": [{"all": ["x1", "-x1", "zmin - x2"]}, {"all": ["x1 - 1", "1 - x1", "x2 - zmax"]}]},
  "D": {"any": [{"all": ["x1", "-x1", "x2 - zmin"]}, {"all": ["x1 - 1", "1 - x1", "zmax - x2"]}]},
  "F": ["0", "-x2 + zo + zdelta*x1"],
  "G": ["1 - x1", "x2"],
  "barrier": ["x2 - zmax", "zmin - x2"],
  "box": {"lo": [-0.5, 0], "hi": [1.5, 2]},
  "expected": {
    "checks": [
      {"theorem": "thm1", "status": "NoViolationFound"},
      {"theorem": "invariance", "status": "NoViolationFound"}
    ],
    "falsify": [{"mode": "invariance", "result": "none", "budget": 100, "T": 5, "J": 10}]
  }
}
)json";

constexpr std::string_view kBouncingBall = R"json({
  "name": "bouncing-ball",
  "dim": 2,
  "constants": {"gamma": 1, "lambda": 0.5},
  "C": {"any": [{"leaf": "-x1", "strict": true}, {"all": ["x1", "-x1", "-x2"]}]},
  "D": {"all": ["x1", "-x1", "x2"]},
  "F": ["x2", "-gamma"],
  "G": ["0", "-lambda*x2"],
  "barrier": ["2*gamma*x1 + (x2 - 1)*(x2 + 1)"],
  "box": {"lo": [-0.5, -1.5], "hi": [1.5, 1.5]},
  "expected": {
    "checks": [
      {"theorem": "thm1", "status": "NoViolationFound"},
      {"theorem": "invariance", "status": "NoViolationFound"},
      {"theorem": "contract-c1", "status": "Violated"}
    ],
    "falsify": [
      {"mode": "invariance", "result": "none", "budget": 50, "T": 5, "J": 10},
      {"mode": "contractivity", "result": "counterexample", "budget": 20, "T": 0.5, "J": 2}
    ]
  }
}
)json";

constexpr std::string_view kExp1nwbis = R"json({
  "name": "exp1nwbis",
  "dim": 2,
  "params": 1,
  "C": {"all": ["-x2", "x1 - 1", "-x1 - 1"]},
  "D": {"all": ["x2", "-x2", "x1^2 + x2^2 - 1"]},
  "F": ["-x2^2*x1", "-(x1^2 + x2^2 - p1)*(2 - (x1^2 + x2^2))"],
  "G": ["0", "p1*abs(x1)"],
  "barrier": ["x2*(x1^2 + x2^2 - 1)"],
  "box": {"lo": [-1.5, -1.5], "hi": [1.5, 1.5]},
  "expected": {
    "checks": [{"theorem": "external", "status": "NoViolationFound"}],
    "falsify": [{"mode": "invariance", "result": "none", "budget": 30, "T": 3, "J": 5}]
  }
}
)json";

constexpr std::string_view kExpillu = R"json({
  "name": "expillu",
  "dim": 2,
  "C": {"all": []},
  "D": {"any": []},
  "F": ["1", "sqrt(abs(x2))"],
  "G": ["x1", "x2"],
  "barrier": ["x2"],
  "box": {"lo": [-1, -1], "hi": [1, 1]},
  "expected": {
    "checks": [{"theorem": "thm1", "status": "Violated"}],
    "falsify": [{"mode": "invariance", "result": "counterexample", "budget": 50, "T": 1, "J": 0, "step": 1e-3}]
  }
}
)json";

constexpr std::string_view kExpcount = R"json({
  "name": "expcount",
  "dim": 2,
  "C": {"any": ["x1^2 - x2", "x1^2 + x2", "x1", {"all": ["x2", "-x2"]}]},
  "D": {"any": []},
  "F": ["1", "0"],
  "G": ["x1", "x2"],
  "barrier": [{"expr": "x2 + max(x1, 0)^3", "smoothness": "c1"}],
  "box": {"lo": [-0.5, -0.5], "hi": [0.5, 0.5]},
  "expected": {
    "checks": [
      {"theorem": "boundary", "option": "a", "rho": "linear:1", "status": "Violated"},
      {"theorem": "boundary", "option": "b", "rho": "linear:1", "status": "Violated"},
      {"theorem": "boundary", "option": "c", "rho": "linear:1", "status": "Inconclusive"}
    ],
    "falsify": [{"mode": "invariance", "result": "counterexample", "budget": 50, "T": 1, "J": 0}]
  }
}
)json";

constexpr std::string_view kExpcountFixed = R"json({
  "name": "expcount-fixed",
  "dim": 2,
  "C": {"any": ["x1^2 - x2", "x1^2 + x2", "x1"]},
  "D": {"any": []},
  "F": ["1", "0"],
  "G": ["x1", "x2"],
  "barrier": [{"expr": "x2 + max(x1, 0)^3", "smoothness": "c1"}],
  "box": {"lo": [-0.5, -0.5], "hi": [0.5, 0.5]},
  "expected": {
    "checks": [
      {"theorem": "boundary", "option": "a", "rho": "linear:1", "status": "Violated"},
      {"theorem": "boundary", "option": "b", "rho": "linear:1", "status": "Violated"},
      {"theorem": "boundary", "option": "c", "rho": "linear:1", "status": "Inconclusive"}
    ],
    "falsify": [{"mode": "invariance", "result": "none", "budget": 50, "T": 1, "J": 0}],
    "notes": ["The axis {x2 = 0} is removed from C, so solutions stop at the origin instead of escaping; the boundary options fail regardless."]
  }
}
)json";

constexpr std::string_view kExprj = R"json({
  "name": "exprj",
  "dim": 2,
  "C": {"all": ["-x2", "x2 - 1", "x1^2 - 3"]},
  "D": {"all": ["x2", "-x2", "x1^2 - 3"]},
  "F": ["-(x2 + 1)", "-2*(x2 + 1) + x1"],
  "G": ["x1/sqrt(3)", "0.5"],
  "barrier": ["x1^2 + (x2 + 1)^2 - 4", "-x2"],
  "box": {"lo": [-2, -0.5], "hi": [2, 1.5]},
  "expected": {
    "checks": [
      {"theorem": "contract-c1", "status": "NoViolationFound"},
      {"theorem": "contract-complete", "status": "NoViolationFound"}
    ],
    "falsify": [
      {"mode": "invariance", "result": "none", "budget": 30, "T": 3, "J": 5},
      {"mode": "contractivity", "result": "none", "budget": 50, "T": 0.5, "J": 2}
    ]
  }
}
)json";

constexpr std::string_view kExpCsets = R"json({
  "name": "expCsets",
  "dim": 2,
  "params": 1,
  "C": "-x2 - 1",
  "D": {"all": ["x2 + 1", {"any": [{"leaf": "x2 + 1", "strict": true}, {"leaf": "-(x1 + 1)^2", "strict": true}]}]},
  "F": ["-(1 + p1)*x1 + x2/2", "-x2 - x1/2"],
  "G": ["0.5*p1*x1", "-0.5*p1*x2"],
  "barrier": ["x1^2 + x2^2 - 2", "-(x2 + 1)"],
  "box": {"lo": [-2, -2], "hi": [2, 2]},
  "expected": {
    "checks": [
      {"theorem": "cset", "status": "NoViolationFound"},
      {"theorem": "contract-complete", "status": "NoViolationFound"}
    ],
    "falsify": [{"mode": "invariance", "result": "none", "budget": 30, "T": 3, "J": 5}]
  }
}
)json";

constexpr std::array<Fixture, 9> kFixtures{{
    {"exp1", "two-component barrier with a parameterized flow and jump", kExp1},
    {"thermostat", "switched heater with hysteresis", kThermostat},
    {"bouncing-ball", "ball with restitution, energy barrier", kBouncingBall},
    {"exp1nwbis", "product barrier checked through the external cone", kExp1nwbis},
    {"expillu", "non-Lipschitz flow that leaves the half plane", kExpillu},
    {"expcount", "boundary conditions fail and a solution escapes", kExpcount},
    {"expcount-fixed", "boundary conditions fail but no solution escapes", kExpcountFixed},
    {"exprj", "contractive set under flow and jump", kExprj},
    {"expCsets", "compact convex set through its gauge", kExpCsets},
}};

}  // namespace

std::span<const Fixture> fixtures() { return kFixtures; }

std::vector<std::string> ids() {
    std::vector<std::string> out;
    for (const auto& f : kFixtures) out.emplace_back(f.id);
    return out;
}

const Fixture* find(std::string_view id) {
    for (const auto& f : kFixtures) {
        if (f.id == id) return &f;
    }
    return nullptr;
}

config::SystemConfig load(std::string_view id) {
    const Fixture* f = find(id);
    if (!f) throw std::out_of_range("unknown example: " + std::string(id));
    return config::parse_config(f->json, std::string(id) + ".json");
}

}  // namespace hibarrier::catalog
