#pragma once

// Full chess: mailbox board, legal move generation, FEN round-tripping, SAN
// input tolerance, mate/stalemate and draw detection (threefold, 50-move,
// insufficient material). Move generation is a plain array generator with
// copy-make legality tests; the performance target is desk scale, not
// engine grade.
//
// The side to move at the constructed root is the Max player. Actions encode
// as UCI long algebraic ("e2e4", "e7e8q"); legal_actions is sorted on that
// encoding.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pmcts/game.hpp"

namespace pmcts {

namespace chess_detail {

// Piece codes: positive white, negative black, magnitude is the type.
enum PieceType : int { PT_NONE = 0, PT_PAWN = 1, PT_KNIGHT, PT_BISHOP, PT_ROOK, PT_QUEEN, PT_KING };

constexpr int file_of(int sq) { return sq & 7; }
constexpr int rank_of(int sq) { return sq >> 3; }
constexpr int make_sq(int file, int rank) { return rank * 8 + file; }
constexpr bool on_board(int file, int rank) { return file >= 0 && file < 8 && rank >= 0 && rank < 8; }

inline std::string square_name(int sq) {
    return {static_cast<char>('a' + file_of(sq)), static_cast<char>('1' + rank_of(sq))};
}

constexpr int KNIGHT_DELTAS[8][2] = {{1, 2},  {2, 1},  {2, -1}, {1, -2},
                                     {-1, -2}, {-2, -1}, {-2, 1}, {-1, 2}};
constexpr int KING_DELTAS[8][2] = {{1, 0}, {1, 1},  {0, 1},  {-1, 1},
                                   {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
constexpr int BISHOP_DIRS[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
constexpr int ROOK_DIRS[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

inline char piece_char(int piece) {
    static const char* white = " PNBRQK";
    char c = white[piece < 0 ? -piece : piece];
    return piece < 0 ? static_cast<char>(std::tolower(c)) : c;
}

inline int piece_from_char(char c, bool* ok) {
    *ok = true;
    bool black = std::islower(static_cast<unsigned char>(c));
    switch (std::toupper(static_cast<unsigned char>(c))) {
        case 'P': return black ? -PT_PAWN : PT_PAWN;
        case 'N': return black ? -PT_KNIGHT : PT_KNIGHT;
        case 'B': return black ? -PT_BISHOP : PT_BISHOP;
        case 'R': return black ? -PT_ROOK : PT_ROOK;
        case 'Q': return black ? -PT_QUEEN : PT_QUEEN;
        case 'K': return black ? -PT_KING : PT_KING;
        default: *ok = false; return 0;
    }
}

struct Zobrist {
    std::uint64_t piece[13][64];  // index piece + 6 (0..12, 6 unused)
    std::uint64_t side;
    std::uint64_t castling[16];
    std::uint64_t ep_file[8];

    Zobrist() {
        std::mt19937_64 rng(0x9d39247e33776d41ull);
        for (auto& row : piece)
            for (auto& x : row) x = rng();
        side = rng();
        for (auto& x : castling) x = rng();
        for (auto& x : ep_file) x = rng();
    }
};

inline const Zobrist& zobrist() {
    static const Zobrist z;
    return z;
}

}  // namespace chess_detail

struct ChessMove {
    std::uint8_t from = 0;
    std::uint8_t to = 0;
    std::int8_t promo = 0;  // PieceType or 0

    bool operator==(const ChessMove&) const = default;
};

// Castling rights bits.
enum : std::uint8_t { CASTLE_WK = 1, CASTLE_WQ = 2, CASTLE_BK = 4, CASTLE_BQ = 8 };

struct ChessBoard {
    std::array<std::int8_t, 64> squares{};
    bool white_to_move = true;
    std::uint8_t castling = 0;
    std::int8_t ep_square = -1;  // raw double-push target, -1 if none
    std::uint16_t halfmove_clock = 0;
    std::uint16_t fullmove = 1;
    std::vector<std::uint64_t> repetition_keys;  // keys since the constructed root, incl. this

    bool operator==(const ChessBoard& o) const {
        return squares == o.squares && white_to_move == o.white_to_move && castling == o.castling &&
               ep_square == o.ep_square && halfmove_clock == o.halfmove_clock && fullmove == o.fullmove;
    }
};

namespace chess_detail {

inline bool is_attacked(const std::array<std::int8_t, 64>& sq, int target, bool by_white) {
    int tf = file_of(target), tr = rank_of(target);
    int sign = by_white ? 1 : -1;
    // Pawns: a white pawn on (f, r) attacks (f±1, r+1).
    int pawn_rank = tr - sign;
    if (pawn_rank >= 0 && pawn_rank < 8) {
        for (int df : {-1, 1}) {
            int f = tf + df;
            if (f >= 0 && f < 8 && sq[make_sq(f, pawn_rank)] == sign * PT_PAWN) return true;
        }
    }
    for (const auto& d : KNIGHT_DELTAS) {
        int f = tf + d[0], r = tr + d[1];
        if (on_board(f, r) && sq[make_sq(f, r)] == sign * PT_KNIGHT) return true;
    }
    for (const auto& d : KING_DELTAS) {
        int f = tf + d[0], r = tr + d[1];
        if (on_board(f, r) && sq[make_sq(f, r)] == sign * PT_KING) return true;
    }
    for (const auto& d : BISHOP_DIRS) {
        int f = tf + d[0], r = tr + d[1];
        while (on_board(f, r)) {
            int p = sq[make_sq(f, r)];
            if (p != 0) {
                if (p == sign * PT_BISHOP || p == sign * PT_QUEEN) return true;
                break;
            }
            f += d[0];
            r += d[1];
        }
    }
    for (const auto& d : ROOK_DIRS) {
        int f = tf + d[0], r = tr + d[1];
        while (on_board(f, r)) {
            int p = sq[make_sq(f, r)];
            if (p != 0) {
                if (p == sign * PT_ROOK || p == sign * PT_QUEEN) return true;
                break;
            }
            f += d[0];
            r += d[1];
        }
    }
    return false;
}

inline int king_square(const std::array<std::int8_t, 64>& sq, bool white) {
    int code = white ? PT_KING : -PT_KING;
    for (int i = 0; i < 64; ++i)
        if (sq[i] == code) return i;
    return -1;
}

// Applies a move to the square array only (no clocks/keys). Enough for
// legality and attack tests.
inline void apply_to_squares(std::array<std::int8_t, 64>& sq, const ChessMove& m, bool white,
                             int ep_square) {
    int piece = sq[m.from];
    int type = piece < 0 ? -piece : piece;
    sq[m.from] = 0;
    if (type == PT_PAWN && m.to == ep_square && sq[m.to] == 0) {
        sq[m.to - (white ? 8 : -8)] = 0;  // captured pawn sits behind the target
    }
    sq[m.to] = static_cast<std::int8_t>(m.promo != 0 ? (white ? m.promo : -m.promo) : piece);
    if (type == PT_KING && file_of(m.from) == 4) {
        int rank = rank_of(m.from);
        if (file_of(m.to) == 6) {  // king side: rook h -> f
            sq[make_sq(5, rank)] = sq[make_sq(7, rank)];
            sq[make_sq(7, rank)] = 0;
        } else if (file_of(m.to) == 2) {  // queen side: rook a -> d
            sq[make_sq(3, rank)] = sq[make_sq(0, rank)];
            sq[make_sq(0, rank)] = 0;
        }
    }
}

inline bool leaves_king_safe(const ChessBoard& b, const ChessMove& m) {
    auto sq = b.squares;
    apply_to_squares(sq, m, b.white_to_move, b.ep_square);
    int k = king_square(sq, b.white_to_move);
    return !is_attacked(sq, k, !b.white_to_move);
}

inline void push_pawn_moves(std::vector<ChessMove>& out, int from, int to) {
    int promo_rank = rank_of(to);
    if (promo_rank == 0 || promo_rank == 7) {
        for (int p : {PT_QUEEN, PT_ROOK, PT_BISHOP, PT_KNIGHT})
            out.push_back({static_cast<std::uint8_t>(from), static_cast<std::uint8_t>(to),
                           static_cast<std::int8_t>(p)});
    } else {
        out.push_back({static_cast<std::uint8_t>(from), static_cast<std::uint8_t>(to), 0});
    }
}

inline std::vector<ChessMove> pseudo_moves(const ChessBoard& b) {
    std::vector<ChessMove> out;
    out.reserve(48);
    bool white = b.white_to_move;
    int sign = white ? 1 : -1;
    for (int from = 0; from < 64; ++from) {
        int piece = b.squares[from];
        if (piece == 0 || (piece > 0) != white) continue;
        int type = piece < 0 ? -piece : piece;
        int f = file_of(from), r = rank_of(from);
        switch (type) {
            case PT_PAWN: {
                int fwd = r + sign;
                if (fwd >= 0 && fwd < 8 && b.squares[make_sq(f, fwd)] == 0) {
                    push_pawn_moves(out, from, make_sq(f, fwd));
                    int start_rank = white ? 1 : 6;
                    int fwd2 = r + 2 * sign;
                    if (r == start_rank && b.squares[make_sq(f, fwd2)] == 0)
                        out.push_back({static_cast<std::uint8_t>(from),
                                       static_cast<std::uint8_t>(make_sq(f, fwd2)), 0});
                }
                for (int df : {-1, 1}) {
                    int cf = f + df;
                    if (cf < 0 || cf >= 8 || fwd < 0 || fwd >= 8) continue;
                    int to = make_sq(cf, fwd);
                    int victim = b.squares[to];
                    if (victim != 0 && (victim > 0) != white) push_pawn_moves(out, from, to);
                    else if (to == b.ep_square && victim == 0)
                        out.push_back({static_cast<std::uint8_t>(from), static_cast<std::uint8_t>(to), 0});
                }
                break;
            }
            case PT_KNIGHT:
                for (const auto& d : KNIGHT_DELTAS) {
                    int nf = f + d[0], nr = r + d[1];
                    if (!on_board(nf, nr)) continue;
                    int victim = b.squares[make_sq(nf, nr)];
                    if (victim == 0 || (victim > 0) != white)
                        out.push_back({static_cast<std::uint8_t>(from),
                                       static_cast<std::uint8_t>(make_sq(nf, nr)), 0});
                }
                break;
            case PT_KING:
                for (const auto& d : KING_DELTAS) {
                    int nf = f + d[0], nr = r + d[1];
                    if (!on_board(nf, nr)) continue;
                    int victim = b.squares[make_sq(nf, nr)];
                    if (victim == 0 || (victim > 0) != white)
                        out.push_back({static_cast<std::uint8_t>(from),
                                       static_cast<std::uint8_t>(make_sq(nf, nr)), 0});
                }
                break;
            case PT_BISHOP:
            case PT_ROOK:
            case PT_QUEEN: {
                auto slide = [&](const int dirs[][2], int n) {
                    for (int i = 0; i < n; ++i) {
                        int nf = f + dirs[i][0], nr = r + dirs[i][1];
                        while (on_board(nf, nr)) {
                            int to = make_sq(nf, nr);
                            int victim = b.squares[to];
                            if (victim == 0) {
                                out.push_back({static_cast<std::uint8_t>(from),
                                               static_cast<std::uint8_t>(to), 0});
                            } else {
                                if ((victim > 0) != white)
                                    out.push_back({static_cast<std::uint8_t>(from),
                                                   static_cast<std::uint8_t>(to), 0});
                                break;
                            }
                            nf += dirs[i][0];
                            nr += dirs[i][1];
                        }
                    }
                };
                if (type != PT_ROOK) slide(BISHOP_DIRS, 4);
                if (type != PT_BISHOP) slide(ROOK_DIRS, 4);
                break;
            }
        }
    }
    // Castling. Legality of the crossed squares is checked here; the final
    // king-safety test is shared with every other move.
    int home = white ? 0 : 7;
    int king_from = make_sq(4, home);
    if (b.squares[king_from] == sign * PT_KING && !is_attacked(b.squares, king_from, !white)) {
        std::uint8_t k_bit = white ? CASTLE_WK : CASTLE_BK;
        std::uint8_t q_bit = white ? CASTLE_WQ : CASTLE_BQ;
        if ((b.castling & k_bit) && b.squares[make_sq(7, home)] == sign * PT_ROOK &&
            b.squares[make_sq(5, home)] == 0 && b.squares[make_sq(6, home)] == 0 &&
            !is_attacked(b.squares, make_sq(5, home), !white))
            out.push_back({static_cast<std::uint8_t>(king_from),
                           static_cast<std::uint8_t>(make_sq(6, home)), 0});
        if ((b.castling & q_bit) && b.squares[make_sq(0, home)] == sign * PT_ROOK &&
            b.squares[make_sq(1, home)] == 0 && b.squares[make_sq(2, home)] == 0 &&
            b.squares[make_sq(3, home)] == 0 && !is_attacked(b.squares, make_sq(3, home), !white))
            out.push_back({static_cast<std::uint8_t>(king_from),
                           static_cast<std::uint8_t>(make_sq(2, home)), 0});
    }
    return out;
}

inline bool in_check(const ChessBoard& b) {
    int k = king_square(b.squares, b.white_to_move);
    return is_attacked(b.squares, k, !b.white_to_move);
}

inline bool any_legal_move(const ChessBoard& b) {
    for (const auto& m : pseudo_moves(b))
        if (leaves_king_safe(b, m)) return true;
    return false;
}

// A legal en-passant capture must exist for the ep field to appear in the
// canonical FEN and in repetition keys.
inline bool ep_capture_legal(const ChessBoard& b) {
    if (b.ep_square < 0) return false;
    int f = file_of(b.ep_square), r = rank_of(b.ep_square);
    int sign = b.white_to_move ? 1 : -1;
    for (int df : {-1, 1}) {
        int pf = f + df, pr = r - sign;
        if (!on_board(pf, pr)) continue;
        int from = make_sq(pf, pr);
        if (b.squares[from] != sign * PT_PAWN) continue;
        ChessMove m{static_cast<std::uint8_t>(from), static_cast<std::uint8_t>(b.ep_square), 0};
        if (leaves_king_safe(b, m)) return true;
    }
    return false;
}

inline std::uint64_t position_key(const ChessBoard& b) {
    const Zobrist& z = zobrist();
    std::uint64_t key = 0;
    for (int i = 0; i < 64; ++i)
        if (b.squares[i] != 0) key ^= z.piece[b.squares[i] + 6][i];
    if (b.white_to_move) key ^= z.side;
    key ^= z.castling[b.castling];
    if (ep_capture_legal(b)) key ^= z.ep_file[file_of(b.ep_square)];
    return key;
}

inline ChessBoard make_move(const ChessBoard& b, const ChessMove& m) {
    ChessBoard next = b;
    int piece = b.squares[m.from];
    int type = piece < 0 ? -piece : piece;
    bool capture = b.squares[m.to] != 0 || (type == PT_PAWN && m.to == b.ep_square);
    apply_to_squares(next.squares, m, b.white_to_move, b.ep_square);
    // Castling rights die with king/rook moves and rook captures.
    auto drop_rights_for_square = [&](int sq) {
        switch (sq) {
            case 0: next.castling &= ~CASTLE_WQ; break;
            case 7: next.castling &= ~CASTLE_WK; break;
            case 56: next.castling &= ~CASTLE_BQ; break;
            case 63: next.castling &= ~CASTLE_BK; break;
            case 4: next.castling &= ~(CASTLE_WK | CASTLE_WQ); break;
            case 60: next.castling &= ~(CASTLE_BK | CASTLE_BQ); break;
        }
    };
    drop_rights_for_square(m.from);
    drop_rights_for_square(m.to);
    next.ep_square = -1;
    if (type == PT_PAWN) {
        int diff = static_cast<int>(m.to) - static_cast<int>(m.from);
        if (diff == 16 || diff == -16)
            next.ep_square = static_cast<std::int8_t>((m.from + m.to) / 2);
    }
    next.halfmove_clock = (type == PT_PAWN || capture) ? 0 : b.halfmove_clock + 1;
    if (!b.white_to_move) ++next.fullmove;
    next.white_to_move = !b.white_to_move;
    next.repetition_keys.push_back(position_key(next));
    return next;
}

inline bool insufficient_material(const ChessBoard& b) {
    int minor_count = 0;
    int bishop_color = -1;
    bool bishops_same_color = true;
    bool two_sides = false;
    int white_minors = 0, black_minors = 0;
    for (int i = 0; i < 64; ++i) {
        int p = b.squares[i];
        if (p == 0) continue;
        int type = p < 0 ? -p : p;
        if (type == PT_KING) continue;
        if (type == PT_PAWN || type == PT_ROOK || type == PT_QUEEN) return false;
        ++minor_count;
        (p > 0 ? white_minors : black_minors)++;
        if (type == PT_BISHOP) {
            int color = (file_of(i) + rank_of(i)) & 1;
            if (bishop_color == -1) bishop_color = color;
            else if (color != bishop_color) bishops_same_color = false;
        } else {
            bishops_same_color = false;  // a knight is involved
        }
    }
    two_sides = white_minors > 0 && black_minors > 0;
    if (minor_count == 0) return true;                      // K vs K
    if (minor_count == 1) return true;                      // K+minor vs K
    if (minor_count == 2 && two_sides && bishops_same_color) return true;  // KB vs KB, same color
    return false;
}

}  // namespace chess_detail

inline std::string encode_uci(const ChessMove& m) {
    std::string s = chess_detail::square_name(m.from) + chess_detail::square_name(m.to);
    if (m.promo != 0) {
        static const char* letters = " pnbrqk";
        s += letters[m.promo];
    }
    return s;
}

// Parses placement/side/castling/ep/clock fields with strict validation:
// exactly one king per side, no pawns on the back ranks, the side not to move
// not in check. Vestigial en-passant fields are accepted and canonicalized
// away on output. Impossible castling-rights claims are dropped.
inline ChessBoard parse_fen(const std::string& text) {
    using namespace chess_detail;
    ChessBoard b;
    std::size_t pos = 0;
    auto fail = [&](const std::string& why, std::size_t at) -> ChessBoard {
        throw ParseError(why, at);
    };
    // Piece placement.
    int rank = 7, file = 0;
    for (; pos < text.size() && text[pos] != ' '; ++pos) {
        char c = text[pos];
        if (c == '/') {
            if (file != 8) fail("rank does not contain 8 squares", pos);
            if (rank == 0) fail("too many ranks", pos);
            --rank;
            file = 0;
        } else if (c >= '1' && c <= '8') {
            file += c - '0';
            if (file > 8) fail("rank overflows 8 squares", pos);
        } else {
            bool ok = false;
            int piece = piece_from_char(c, &ok);
            if (!ok) fail(std::string("invalid piece character '") + c + "'", pos);
            if (file >= 8) fail("rank overflows 8 squares", pos);
            b.squares[make_sq(file, rank)] = static_cast<std::int8_t>(piece);
            ++file;
        }
    }
    if (rank != 0 || file != 8) fail("placement must describe 8 ranks of 8 squares", pos);
    auto expect_space = [&]() {
        if (pos >= text.size() || text[pos] != ' ') fail("expected field separator", pos);
        ++pos;
    };
    expect_space();
    if (pos >= text.size() || (text[pos] != 'w' && text[pos] != 'b'))
        fail("side to move must be 'w' or 'b'", pos);
    b.white_to_move = text[pos] == 'w';
    ++pos;
    expect_space();
    std::size_t castle_at = pos;
    b.castling = 0;
    if (pos < text.size() && text[pos] == '-') {
        ++pos;
    } else {
        while (pos < text.size() && text[pos] != ' ') {
            switch (text[pos]) {
                case 'K': b.castling |= CASTLE_WK; break;
                case 'Q': b.castling |= CASTLE_WQ; break;
                case 'k': b.castling |= CASTLE_BK; break;
                case 'q': b.castling |= CASTLE_BQ; break;
                default: fail("invalid castling field", pos);
            }
            ++pos;
        }
        if (pos == castle_at) fail("empty castling field", pos);
    }
    expect_space();
    b.ep_square = -1;
    if (pos < text.size() && text[pos] == '-') {
        ++pos;
    } else {
        if (pos + 1 >= text.size() || text[pos] < 'a' || text[pos] > 'h' ||
            (text[pos + 1] != '3' && text[pos + 1] != '6'))
            fail("invalid en-passant field", pos);
        b.ep_square = static_cast<std::int8_t>(make_sq(text[pos] - 'a', text[pos + 1] - '1'));
        pos += 2;
    }
    expect_space();
    std::size_t clock_at = pos;
    long halfmove = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
        halfmove = halfmove * 10 + (text[pos++] - '0');
    if (pos == clock_at || halfmove > 1000) fail("invalid halfmove clock", clock_at);
    b.halfmove_clock = static_cast<std::uint16_t>(halfmove);
    expect_space();
    std::size_t full_at = pos;
    long fullmove = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
        fullmove = fullmove * 10 + (text[pos++] - '0');
    if (pos == full_at || fullmove < 1 || fullmove > 100000) fail("invalid fullmove number", full_at);
    b.fullmove = static_cast<std::uint16_t>(fullmove);
    if (pos != text.size()) fail("trailing characters after FEN", pos);

    // Structural validation.
    int wk = 0, bk = 0;
    for (int i = 0; i < 64; ++i) {
        int p = b.squares[i];
        if (p == PT_KING) ++wk;
        if (p == -PT_KING) ++bk;
        int type = p < 0 ? -p : p;
        if (type == PT_PAWN && (rank_of(i) == 0 || rank_of(i) == 7))
            fail("pawn on back rank", 0);
    }
    if (wk != 1 || bk != 1) fail("position must contain exactly one king per side", 0);
    // Drop castling rights that the placement cannot support.
    if (b.squares[4] != PT_KING) b.castling &= ~(CASTLE_WK | CASTLE_WQ);
    if (b.squares[7] != PT_ROOK) b.castling &= ~CASTLE_WK;
    if (b.squares[0] != PT_ROOK) b.castling &= ~CASTLE_WQ;
    if (b.squares[60] != -PT_KING) b.castling &= ~(CASTLE_BK | CASTLE_BQ);
    if (b.squares[63] != -PT_ROOK) b.castling &= ~CASTLE_BK;
    if (b.squares[56] != -PT_ROOK) b.castling &= ~CASTLE_BQ;
    // Drop an en-passant target that could not follow a double push.
    if (b.ep_square >= 0) {
        int expect_rank = b.white_to_move ? 5 : 2;
        int pawn_sq = b.ep_square + (b.white_to_move ? -8 : 8);
        int pawn = b.white_to_move ? -PT_PAWN : PT_PAWN;
        if (rank_of(b.ep_square) != expect_rank || b.squares[pawn_sq] != pawn) b.ep_square = -1;
    }
    // The side that just moved must not have left its king in check.
    {
        int k = king_square(b.squares, !b.white_to_move);
        if (is_attacked(b.squares, k, b.white_to_move))
            fail("side not to move is in check", 0);
    }
    b.repetition_keys.push_back(position_key(b));
    return b;
}

inline std::string to_fen(const ChessBoard& b) {
    using namespace chess_detail;
    std::string out;
    for (int rank = 7; rank >= 0; --rank) {
        int empty = 0;
        for (int file = 0; file < 8; ++file) {
            int p = b.squares[make_sq(file, rank)];
            if (p == 0) {
                ++empty;
            } else {
                if (empty) out += static_cast<char>('0' + empty);
                empty = 0;
                out += piece_char(p);
            }
        }
        if (empty) out += static_cast<char>('0' + empty);
        if (rank) out += '/';
    }
    out += b.white_to_move ? " w " : " b ";
    if (b.castling == 0) {
        out += '-';
    } else {
        if (b.castling & CASTLE_WK) out += 'K';
        if (b.castling & CASTLE_WQ) out += 'Q';
        if (b.castling & CASTLE_BK) out += 'k';
        if (b.castling & CASTLE_BQ) out += 'q';
    }
    out += ' ';
    out += ep_capture_legal(b) ? square_name(b.ep_square) : "-";
    out += ' ';
    out += std::to_string(b.halfmove_clock);
    out += ' ';
    out += std::to_string(b.fullmove);
    return out;
}

inline const char* CHESS_STARTPOS_FEN = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";

class ChessGame {
public:
    using Board = ChessBoard;
    using Action = ChessMove;

    ChessGame() : root_(parse_fen(CHESS_STARTPOS_FEN)) {}
    explicit ChessGame(const std::string& fen) : root_(parse_fen(fen)) {}

    std::string name() const { return "chess"; }

    // The side to move at the root is the Max player.
    bool max_is_white() const { return root_.white_to_move; }

    Board initial_board() const { return root_; }

    std::vector<Action> legal_actions(const Board& b) const {
        std::vector<Action> legal;
        if (drawn_without_moves(b)) return legal;
        for (const auto& m : chess_detail::pseudo_moves(b))
            if (chess_detail::leaves_king_safe(b, m)) legal.push_back(m);
        std::sort(legal.begin(), legal.end(), [](const Action& a, const Action& b2) {
            return encode_uci(a) < encode_uci(b2);
        });
        return legal;
    }

    Board apply(const Board& b, const Action& a) const { return chess_detail::make_move(b, a); }

    GameOutcome outcome(const Board& b) const {
        if (!chess_detail::any_legal_move(b)) {
            if (chess_detail::in_check(b)) {
                bool white_won = !b.white_to_move;
                return white_won == max_is_white() ? GameOutcome::MaxWins : GameOutcome::MinWins;
            }
            return GameOutcome::Draw;
        }
        if (drawn_without_moves(b)) return GameOutcome::Draw;
        return GameOutcome::Ongoing;
    }

    double expected_reward(const Board&, const Action&) const { return 0.0; }
    double reward_bound() const { return 0.0; }

    std::string encode_action(const Action& a) const { return encode_uci(a); }

    // Accepts UCI long algebraic or SAN.
    std::optional<Action> decode_action(const Board& b, std::string_view text) const {
        if (auto m = parse_uci(b, text)) return m;
        return parse_san(b, text);
    }

    std::string board_key(const Board& b) const { return to_fen(b); }
    std::string solver_key(const Board& b) const { return to_fen(b); }

    bool in_check(const Board& b) const { return chess_detail::in_check(b); }

    std::optional<Action> parse_uci(const Board& b, std::string_view text) const {
        if (text.size() != 4 && text.size() != 5) return std::nullopt;
        auto sq_of = [](char f, char r) -> int {
            if (f < 'a' || f > 'h' || r < '1' || r > '8') return -1;
            return chess_detail::make_sq(f - 'a', r - '1');
        };
        int from = sq_of(text[0], text[1]);
        int to = sq_of(text[2], text[3]);
        if (from < 0 || to < 0) return std::nullopt;
        int promo = 0;
        if (text.size() == 5) {
            switch (text[4]) {
                case 'q': promo = chess_detail::PT_QUEEN; break;
                case 'r': promo = chess_detail::PT_ROOK; break;
                case 'b': promo = chess_detail::PT_BISHOP; break;
                case 'n': promo = chess_detail::PT_KNIGHT; break;
                default: return std::nullopt;
            }
        }
        (void)b;
        return Action{static_cast<std::uint8_t>(from), static_cast<std::uint8_t>(to),
                      static_cast<std::int8_t>(promo)};
    }

    // SAN without check/mate suffix.
    std::string to_san(const Board& b, const Action& m) const {
        using namespace chess_detail;
        int piece = b.squares[m.from];
        int type = piece < 0 ? -piece : piece;
        std::string san;
        if (type == PT_KING && file_of(m.from) == 4 && (file_of(m.to) == 6 || file_of(m.to) == 2)) {
            san = file_of(m.to) == 6 ? "O-O" : "O-O-O";
        } else {
            bool capture = b.squares[m.to] != 0 || (type == PT_PAWN && m.to == b.ep_square);
            if (type == PT_PAWN) {
                if (capture) san += static_cast<char>('a' + file_of(m.from)), san += 'x';
                san += square_name(m.to);
                if (m.promo != 0) {
                    san += '=';
                    san += " PNBRQK"[m.promo];
                }
            } else {
                san += " PNBRQK"[type];
                // Disambiguate against same-type pieces that can also reach the target.
                bool need_file = false, need_rank = false, ambiguous = false;
                for (const auto& other : legal_actions(b)) {
                    if (other == m || other.to != m.to || b.squares[other.from] != piece) continue;
                    ambiguous = true;
                    if (file_of(other.from) == file_of(m.from)) need_rank = true;
                    if (rank_of(other.from) == rank_of(m.from)) need_file = true;
                }
                if (ambiguous && !need_file && !need_rank) need_file = true;
                if (need_file) san += static_cast<char>('a' + file_of(m.from));
                if (need_rank) san += static_cast<char>('1' + rank_of(m.from));
                if (capture) san += 'x';
                san += square_name(m.to);
            }
        }
        return san;
    }

    std::string to_san_suffixed(const Board& b, const Action& m) const {
        std::string san = to_san(b, m);
        Board after = apply(b, m);
        if (chess_detail::in_check(after))
            san += chess_detail::any_legal_move(after) ? '+' : '#';
        return san;
    }

    std::optional<Action> parse_san(const Board& b, std::string_view text) const {
        std::string wanted;
        for (char c : text) {
            if (c == '+' || c == '#' || c == '!' || c == '?') continue;
            if (c == '0') c = 'O';  // 0-0 style castles
            wanted += c;
        }
        // strip "e.p." suffix if present
        if (wanted.size() > 4 && wanted.compare(wanted.size() - 4, 4, "e.p.") == 0)
            wanted.resize(wanted.size() - 4);
        if (wanted.empty()) return std::nullopt;
        for (const auto& m : legal_actions(b))
            if (to_san(b, m) == wanted) return m;
        return std::nullopt;
    }

    // Multi-line diagram used by prompt templates.
    std::string board_text(const Board& b) const {
        using namespace chess_detail;
        std::string out;
        for (int rank = 7; rank >= 0; --rank) {
            out += static_cast<char>('1' + rank);
            out += ' ';
            for (int file = 0; file < 8; ++file) {
                int p = b.squares[make_sq(file, rank)];
                out += p == 0 ? '.' : piece_char(p);
                out += ' ';
            }
            out += '\n';
        }
        out += "  a b c d e f g h\n";
        return out;
    }

private:
    // Draw conditions that apply even though moves exist.
    bool drawn_without_moves(const Board& b) const {
        if (b.halfmove_clock >= 100) return true;
        if (chess_detail::insufficient_material(b)) return true;
        if (!b.repetition_keys.empty()) {
            std::uint64_t current = b.repetition_keys.back();
            int count = 0;
            for (std::uint64_t k : b.repetition_keys) count += k == current;
            if (count >= 3) return true;
        }
        return false;
    }

    Board root_;
};

static_assert(GameRules<ChessGame>);

// Leaf count of the legal-move tree at exactly `depth` plies.
inline std::uint64_t perft(const ChessGame& game, const ChessBoard& board, int depth) {
    if (depth <= 0) return 1;
    std::uint64_t nodes = 0;
    for (const auto& m : game.legal_actions(board)) {
        if (depth == 1) ++nodes;
        else nodes += perft(game, game.apply(board, m), depth - 1);
    }
    return nodes;
}

}  // namespace pmcts
