#pragma once
// Bundled system files, available through `tsdae example <name>`.

#include <map>
#include <string>

namespace tsdae {

inline const std::map<std::string, std::string>& bundled_examples() {
    static const std::map<std::string, std::string> ex = {
        {"paper_example", R"({
  "name": "paper_example",
  "grid": {"kind": "geometric", "q": 2, "t0": 1, "count": 11},
  "n": 5,
  "m": 3,
  "A": [["1", "0", "0"],
        ["0", "1/t", "0"],
        ["0", "0", "1"],
        ["0", "0", "0"],
        ["0", "0", "0"]],
  "B": [["1", "0", "0", "0", "0"],
        ["0", "2*t", "0", "0", "0"],
        ["0", "0", "1", "0", "0"]],
  "C": [["0", "0", "0", "-1", "1"],
        ["0", "0", "1", "1", "0"],
        ["0", "-1", "0", "0", "0"],
        ["-1", "1", "0", "0", "0"],
        ["1", "0", "0", "0", "t^2"]],
  "f": ["0", "0", "0", "0", "0"],
  "projectors": {
    "Q0": [[0, 0, 0, 0, 0],
           [0, 0, 0, 0, 0],
           [0, 0, 0, 0, 0],
           [0, 0, 0, 1, 0],
           [0, 0, 0, 0, 1]],
    "Q1": [[1, 0, 0, 0, 0],
           [-1, 0, 0, 0, 0],
           [0, 0, 0, 0, 0],
           [1, 0, 0, 0, 0],
           [0, 0, 0, 0, 0]]
  },
  "options": {"u0": [1, 1, 1]}
}
)"},
        {"identity", R"({
  "name": "identity",
  "grid": {"kind": "uniform", "h": 1, "t0": 0, "count": 10},
  "n": 2,
  "m": 2,
  "A": [[1, 0], [0, 1]],
  "B": [[1, 0], [0, 1]],
  "C": [["0", "0"], ["0", "0"]],
  "f": [0, 0]
}
)"},
        {"algebraic", R"({
  "name": "algebraic",
  "grid": {"kind": "uniform", "h": 1, "t0": 0, "count": 10},
  "n": 2,
  "m": 2,
  "A": [[0, 0], [0, 0]],
  "B": [[0, 0], [0, 0]],
  "C": [[1, 0], [0, 1]],
  "f": ["t", "1 - t^2"],
  "options": {"u0": [0, 0]}
}
)"},
        {"zero", R"({
  "name": "zero",
  "grid": {"kind": "uniform", "h": 1, "t0": 0, "count": 10},
  "n": 2,
  "m": 2,
  "A": [[0, 0], [0, 0]],
  "B": [[0, 0], [0, 0]],
  "C": [[0, 0], [0, 0]],
  "f": [0, 0]
}
)"},
    };
    return ex;
}

} // namespace tsdae
