// Copyright 2026 The VISA-VIS Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Rules, symmetries and tensor encoding for the three supported games:
// 3x3 Tic-Tac-Toe, 4x4 Tic-Tac-Toe and Connect Four (6 rows x 7 columns).
//
// Boards are stored as one bitboard per player. Cell index = row * cols + col
// with row 0 at the top. Connect Four pieces fall towards the last row.

#ifndef VISAVIS_GAME_HPP_
#define VISAVIS_GAME_HPP_

#include <algorithm>
#include <array>
#include <bit>
#include <cstddef>
#include <cstdlib>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "visavis/errors.hpp"

namespace visavis {

enum class GameId : std::uint8_t { kTicTacToe, kTicTacToe4, kConnectFour };

inline constexpr std::array<GameId, 3> kAllGames = {
    GameId::kTicTacToe, GameId::kTicTacToe4, GameId::kConnectFour};

struct GameShape {
  int rows;
  int cols;
  int num_actions;
  int line_length;
  constexpr int num_cells() const { return rows * cols; }
};

constexpr GameShape shape_of(GameId game) {
  switch (game) {
    case GameId::kTicTacToe:
      return {3, 3, 9, 3};
    case GameId::kTicTacToe4:
      return {4, 4, 16, 4};
    case GameId::kConnectFour:
      return {6, 7, 7, 4};
  }
  return {0, 0, 0, 0};
}

// Short names used in configs and on the command line.
inline std::string_view game_name(GameId game) {
  switch (game) {
    case GameId::kTicTacToe:
      return "ttt3";
    case GameId::kTicTacToe4:
      return "ttt4";
    case GameId::kConnectFour:
      return "c4";
  }
  return "?";
}

inline std::optional<GameId> game_from_name(std::string_view name) {
  for (GameId g : kAllGames)
    if (game_name(g) == name) return g;
  return std::nullopt;
}

enum class Player : std::uint8_t { kP1 = 0, kP2 = 1 };
enum class Cell : std::uint8_t { kEmpty, kP1, kP2 };

constexpr Player opponent(Player p) {
  return p == Player::kP1 ? Player::kP2 : Player::kP1;
}

// For TTT games: row * cols + col. For Connect Four: the column.
using Action = int;

inline constexpr int kMaxCells = 42;

class GameState {
 public:
  GameState() = default;
  explicit GameState(GameId game) : game_(game) {}

  // Builds a state from explicit cells; throws ParseError when the position
  // violates the piece-count or gravity invariants.
  static GameState from_cells(GameId game, std::span<const Cell> cells,
                              Player to_move);

  GameId game() const { return game_; }
  GameShape shape() const { return shape_of(game_); }
  Player to_move() const { return to_move_; }
  int ply() const { return std::popcount(bits_[0] | bits_[1]); }

  std::uint64_t pieces(Player p) const {
    return bits_[static_cast<int>(p)];
  }
  std::uint64_t occupied() const { return bits_[0] | bits_[1]; }

  Cell cell(int index) const {
    const std::uint64_t m = std::uint64_t{1} << index;
    if (bits_[0] & m) return Cell::kP1;
    if (bits_[1] & m) return Cell::kP2;
    return Cell::kEmpty;
  }
  Cell cell(int row, int col) const { return cell(row * shape().cols + col); }

  friend bool operator==(const GameState&, const GameState&) = default;

 private:
  friend GameState apply_action(const GameState&, Action);
  friend struct TransformAccess;

  GameId game_ = GameId::kTicTacToe;
  Player to_move_ = Player::kP1;
  std::array<std::uint64_t, 2> bits_{0, 0};
};

// Exact state identity (pieces of both players plus the mover), used as a key
// by the oracle, caches and visit tables.
struct StateKey {
  std::uint64_t p1 = 0;
  std::uint64_t p2 = 0;  // bit 63 carries the mover

  friend auto operator<=>(const StateKey&, const StateKey&) = default;
};

inline StateKey state_key(const GameState& s) {
  return {s.pieces(Player::kP1),
          s.pieces(Player::kP2) |
              (s.to_move() == Player::kP2 ? (std::uint64_t{1} << 63) : 0)};
}

struct StateKeyHash {
  std::size_t operator()(const StateKey& k) const {
    std::uint64_t h = k.p1 * 0x9e3779b97f4a7c15ULL;
    h ^= (k.p2 + 0x7f4a7c159e3779b9ULL) * 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 31;
    return static_cast<std::size_t>(h);
  }
};

// Terminal score, always from P1's point of view.
struct Outcome {
  int z = 0;  // +1 P1 won, -1 P2 won, 0 draw
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

// Converts a P1-fixed score to the perspective of `mover`.
constexpr int relative_to(int p1_value, Player mover) {
  return mover == Player::kP1 ? p1_value : -p1_value;
}

namespace internal {

inline std::vector<std::uint64_t> build_lines(GameId game) {
  const GameShape sh = shape_of(game);
  std::vector<std::uint64_t> lines;
  const int dr[4] = {0, 1, 1, 1};
  const int dc[4] = {1, 0, 1, -1};
  for (int r = 0; r < sh.rows; ++r) {
    for (int c = 0; c < sh.cols; ++c) {
      for (int d = 0; d < 4; ++d) {
        const int er = r + dr[d] * (sh.line_length - 1);
        const int ec = c + dc[d] * (sh.line_length - 1);
        if (er < 0 || er >= sh.rows || ec < 0 || ec >= sh.cols) continue;
        std::uint64_t mask = 0;
        for (int k = 0; k < sh.line_length; ++k)
          mask |= std::uint64_t{1} << ((r + dr[d] * k) * sh.cols + c + dc[d] * k);
        lines.push_back(mask);
      }
    }
  }
  return lines;
}

inline const std::vector<std::uint64_t>& win_lines(GameId game) {
  static const std::array<std::vector<std::uint64_t>, 3> kLines = {
      build_lines(GameId::kTicTacToe), build_lines(GameId::kTicTacToe4),
      build_lines(GameId::kConnectFour)};
  return kLines[static_cast<int>(game)];
}

inline bool has_line(GameId game, std::uint64_t bits) {
  for (std::uint64_t line : win_lines(game))
    if ((bits & line) == line) return true;
  return false;
}

inline std::uint64_t full_board(GameId game) {
  const int n = shape_of(game).num_cells();
  return (std::uint64_t{1} << n) - 1;
}

}  // namespace internal

inline GameState initial_state(GameId game) { return GameState(game); }

inline std::optional<Outcome> terminal_outcome(const GameState& s) {
  if (internal::has_line(s.game(), s.pieces(Player::kP1))) return Outcome{+1};
  if (internal::has_line(s.game(), s.pieces(Player::kP2))) return Outcome{-1};
  if (s.occupied() == internal::full_board(s.game())) return Outcome{0};
  return std::nullopt;
}

inline bool is_terminal(const GameState& s) {
  return terminal_outcome(s).has_value();
}

// Cell that `a` would fill, or -1 when the action is not playable on this
// board (ignores terminal status).
inline int target_cell(const GameState& s, Action a) {
  const GameShape sh = s.shape();
  if (a < 0 || a >= sh.num_actions) return -1;
  if (s.game() != GameId::kConnectFour)
    return (s.occupied() >> a) & 1 ? -1 : a;
  for (int r = sh.rows - 1; r >= 0; --r) {
    const int idx = r * sh.cols + a;
    if (!((s.occupied() >> idx) & 1)) return idx;
  }
  return -1;
}

// Ascending; empty for terminal states.
inline std::vector<Action> legal_actions(const GameState& s) {
  std::vector<Action> actions;
  if (is_terminal(s)) return actions;
  const int n = s.shape().num_actions;
  actions.reserve(n);
  for (Action a = 0; a < n; ++a)
    if (target_cell(s, a) >= 0) actions.push_back(a);
  return actions;
}

using LegalMask = std::vector<std::uint8_t>;

inline LegalMask legal_mask(const GameState& s) {
  LegalMask mask(s.shape().num_actions, 0);
  for (Action a : legal_actions(s)) mask[a] = 1;
  return mask;
}

inline GameState apply_action(const GameState& s, Action a) {
  if (is_terminal(s))
    throw IllegalAction("action " + std::to_string(a) + " on terminal state");
  const int idx = target_cell(s, a);
  if (idx < 0) throw IllegalAction("illegal action " + std::to_string(a));
  GameState next = s;
  next.bits_[static_cast<int>(s.to_move_)] |= std::uint64_t{1} << idx;
  next.to_move_ = opponent(s.to_move_);
  return next;
}

// ---------------------------------------------------------------------------
// Symmetries.

enum class Dihedral : std::uint8_t {
  kIdentity,
  kRot90,  // clockwise
  kRot180,
  kRot270,
  kMirror,  // left-right
  kFlipVertical,
  kTranspose,
  kAntiTranspose,
};

struct Transform {
  Dihedral spatial = Dihedral::kIdentity;
  bool invert = false;  // swap the players' pieces and the mover

  friend bool operator==(const Transform&, const Transform&) = default;
};

inline constexpr Transform kIdentityTransform{};

inline std::string transform_name(const Transform& t) {
  static constexpr std::array<const char*, 8> kNames = {
      "id", "rot90", "rot180", "rot270", "mirror", "flipv", "transpose",
      "antitranspose"};
  std::string name = kNames[static_cast<int>(t.spatial)];
  if (t.invert) name += "+invert";
  return name;
}

inline std::optional<Transform> transform_from_name(std::string_view name) {
  for (int d = 0; d < 8; ++d)
    for (bool inv : {false, true}) {
      const Transform t{static_cast<Dihedral>(d), inv};
      if (transform_name(t) == name) return t;
    }
  return std::nullopt;
}

constexpr Transform inverse(const Transform& t) {
  Dihedral d = t.spatial;
  if (d == Dihedral::kRot90)
    d = Dihedral::kRot270;
  else if (d == Dihedral::kRot270)
    d = Dihedral::kRot90;
  return {d, t.invert};
}

// Non-identity transforms in a fixed order: spatial-only first, then
// inversion combined with each spatial element (identity first).
inline std::vector<Transform> symmetry_group(GameId game) {
  std::vector<Dihedral> spatial;
  if (game == GameId::kConnectFour) {
    spatial = {Dihedral::kIdentity, Dihedral::kMirror};
  } else {
    for (int d = 0; d < 8; ++d) spatial.push_back(static_cast<Dihedral>(d));
  }
  std::vector<Transform> group;
  for (Dihedral d : spatial)
    if (d != Dihedral::kIdentity) group.push_back({d, false});
  for (Dihedral d : spatial) group.push_back({d, true});
  return group;
}

inline bool is_symmetry_of(GameId game, const Transform& t) {
  if (t.spatial == Dihedral::kIdentity) return true;
  const auto group = symmetry_group(game);
  return std::find(group.begin(), group.end(), t) != group.end();
}

// Spatial cell permutation: result[old_index] = new_index.
inline std::array<int, kMaxCells> cell_permutation(GameId game, Dihedral d) {
  const GameShape sh = shape_of(game);
  if (game == GameId::kConnectFour && d != Dihedral::kIdentity &&
      d != Dihedral::kMirror)
    throw std::invalid_argument("Connect Four only admits the mirror symmetry");
  const int n = sh.rows;  // square boards for everything but identity/mirror
  std::array<int, kMaxCells> perm{};
  for (int r = 0; r < sh.rows; ++r) {
    for (int c = 0; c < sh.cols; ++c) {
      int nr = r, nc = c;
      switch (d) {
        case Dihedral::kIdentity:
          break;
        case Dihedral::kRot90:
          nr = c, nc = n - 1 - r;
          break;
        case Dihedral::kRot180:
          nr = n - 1 - r, nc = n - 1 - c;
          break;
        case Dihedral::kRot270:
          nr = n - 1 - c, nc = r;
          break;
        case Dihedral::kMirror:
          nc = sh.cols - 1 - c;
          break;
        case Dihedral::kFlipVertical:
          nr = n - 1 - r;
          break;
        case Dihedral::kTranspose:
          nr = c, nc = r;
          break;
        case Dihedral::kAntiTranspose:
          nr = n - 1 - c, nc = n - 1 - r;
          break;
      }
      perm[r * sh.cols + c] = nr * sh.cols + nc;
    }
  }
  return perm;
}

struct TransformAccess {
  static GameState make(GameId game, std::uint64_t p1, std::uint64_t p2,
                        Player mover) {
    GameState s(game);
    s.bits_ = {p1, p2};
    s.to_move_ = mover;
    return s;
  }
};

inline std::uint64_t permute_bits(std::uint64_t bits,
                                  const std::array<int, kMaxCells>& perm) {
  std::uint64_t out = 0;
  while (bits) {
    const int idx = std::countr_zero(bits);
    out |= std::uint64_t{1} << perm[idx];
    bits &= bits - 1;
  }
  return out;
}

inline GameState apply_transform(const GameState& s, const Transform& t) {
  const auto perm = cell_permutation(s.game(), t.spatial);
  std::uint64_t p1 = permute_bits(s.pieces(Player::kP1), perm);
  std::uint64_t p2 = permute_bits(s.pieces(Player::kP2), perm);
  Player mover = s.to_move();
  if (t.invert) {
    std::swap(p1, p2);
    mover = opponent(mover);
  }
  return TransformAccess::make(s.game(), p1, p2, mover);
}

// result[a] is the action in the transformed state that corresponds to `a`.
inline std::vector<Action> transform_action_map(GameId game,
                                                const Transform& t) {
  const GameShape sh = shape_of(game);
  std::vector<Action> map(sh.num_actions);
  if (game == GameId::kConnectFour) {
    for (Action a = 0; a < sh.num_actions; ++a)
      map[a] = t.spatial == Dihedral::kMirror ? sh.cols - 1 - a : a;
    if (t.spatial != Dihedral::kIdentity && t.spatial != Dihedral::kMirror)
      throw std::invalid_argument("Connect Four only admits the mirror symmetry");
    return map;
  }
  const auto perm = cell_permutation(game, t.spatial);
  for (Action a = 0; a < sh.num_actions; ++a) map[a] = perm[a];
  return map;
}

// Moves probability mass along with the transform.
template <typename T>
std::vector<T> permute_policy(std::span<const T> policy,
                              std::span<const Action> action_map) {
  std::vector<T> out(policy.size(), T{0});
  for (std::size_t a = 0; a < policy.size(); ++a) out[action_map[a]] = policy[a];
  return out;
}

// ---------------------------------------------------------------------------
// Encoding.

// Three row-major HxW planes: P1 pieces, P2 pieces, turn (1 when P1 moves).
struct StateEncoding {
  int rows = 0;
  int cols = 0;
  std::vector<float> planes;

  std::size_t plane_size() const { return static_cast<std::size_t>(rows) * cols; }
  friend bool operator==(const StateEncoding&, const StateEncoding&) = default;
};

inline StateEncoding encode(const GameState& s) {
  const GameShape sh = s.shape();
  const int n = sh.num_cells();
  StateEncoding enc{sh.rows, sh.cols, std::vector<float>(3 * n, 0.0f)};
  for (int i = 0; i < n; ++i) {
    const Cell c = s.cell(i);
    if (c == Cell::kP1) enc.planes[i] = 1.0f;
    if (c == Cell::kP2) enc.planes[n + i] = 1.0f;
  }
  if (s.to_move() == Player::kP1)
    std::fill(enc.planes.begin() + 2 * n, enc.planes.end(), 1.0f);
  return enc;
}

// ---------------------------------------------------------------------------
// Text form: rows top to bottom joined by '/', then the mover, e.g.
// "X.O/.X./... O". X is always P1.

inline std::string to_string(const GameState& s) {
  const GameShape sh = s.shape();
  std::string out;
  out.reserve(sh.num_cells() + sh.rows + 2);
  for (int r = 0; r < sh.rows; ++r) {
    if (r) out += '/';
    for (int c = 0; c < sh.cols; ++c) {
      const Cell cell = s.cell(r, c);
      out += cell == Cell::kP1 ? 'X' : cell == Cell::kP2 ? 'O' : '.';
    }
  }
  out += s.to_move() == Player::kP1 ? " X" : " O";
  return out;
}

inline GameState GameState::from_cells(GameId game, std::span<const Cell> cells,
                                       Player to_move) {
  const GameShape sh = shape_of(game);
  if (static_cast<int>(cells.size()) != sh.num_cells())
    throw ParseError("expected " + std::to_string(sh.num_cells()) + " cells");
  std::uint64_t p1 = 0, p2 = 0;
  for (int i = 0; i < sh.num_cells(); ++i) {
    if (cells[i] == Cell::kP1) p1 |= std::uint64_t{1} << i;
    if (cells[i] == Cell::kP2) p2 |= std::uint64_t{1} << i;
  }
  const int n1 = std::popcount(p1), n2 = std::popcount(p2);
  // Inverted positions (P2 ahead by one with P1 to move) are accepted so that
  // the symmetry group is closed; the mover is always the side not ahead.
  if (std::abs(n1 - n2) > 1)
    throw ParseError("piece counts differ by more than one");
  if (n1 > n2 && to_move != Player::kP2)
    throw ParseError("P1 is ahead, so P2 must be to move");
  if (n2 > n1 && to_move != Player::kP1)
    throw ParseError("P2 is ahead, so P1 must be to move");
  if (game == GameId::kConnectFour) {
    const std::uint64_t occ = p1 | p2;
    for (int r = 0; r + 1 < sh.rows; ++r)
      for (int c = 0; c < sh.cols; ++c)
        if (((occ >> (r * sh.cols + c)) & 1) &&
            !((occ >> ((r + 1) * sh.cols + c)) & 1))
          throw ParseError("floating piece in column " + std::to_string(c));
  }
  return TransformAccess::make(game, p1, p2, to_move);
}

inline GameState parse_state(GameId game, std::string_view text) {
  const GameShape sh = shape_of(game);
  const auto space = text.rfind(' ');
  if (space == std::string_view::npos || space + 2 != text.size())
    throw ParseError("state must end with ' X' or ' O'");
  const char mover_char = text[space + 1];
  if (mover_char != 'X' && mover_char != 'O')
    throw ParseError("mover must be X or O");
  std::vector<Cell> cells;
  std::string_view board = text.substr(0, space);
  int row = 0, col = 0;
  for (char ch : board) {
    if (ch == '/') {
      if (col != sh.cols) throw ParseError("row " + std::to_string(row) + " has wrong width");
      ++row;
      col = 0;
      continue;
    }
    if (ch != '.' && ch != 'X' && ch != 'O')
      throw ParseError(std::string("unexpected character '") + ch + "'");
    cells.push_back(ch == 'X' ? Cell::kP1 : ch == 'O' ? Cell::kP2 : Cell::kEmpty);
    ++col;
  }
  if (row + 1 != sh.rows || col != sh.cols)
    throw ParseError("board must be " + std::to_string(sh.rows) + "x" +
                     std::to_string(sh.cols));
  return GameState::from_cells(game, cells,
                               mover_char == 'X' ? Player::kP1 : Player::kP2);
}

}  // namespace visavis

template <>
struct std::hash<visavis::StateKey> {
  std::size_t operator()(const visavis::StateKey& k) const {
    return visavis::StateKeyHash{}(k);
  }
};

#endif  // VISAVIS_GAME_HPP_
