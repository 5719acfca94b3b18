#pragma once

// Test-only minimal chess move generator, written independently of the main
// engine for cross-validation. Different design on purpose: an 8x8 char
// matrix indexed (rank, file), legality decided by "make the move, then see
// whether any opponent pseudo-move captures the king", and square attacks
// probed by dropping a dummy defender on the square. No draw rules; this
// generator only answers "which moves are legal" and perft counts.

#include <array>
#include <cctype>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace chess_ref {

struct Pos {
    char board[8][8];  // [rank][file], '.' empty, white upper, black lower
    bool white_to_move = true;
    bool castle_wk = false, castle_wq = false, castle_bk = false, castle_bq = false;
    int ep_rank = -1, ep_file = -1;
};

struct Mv {
    int fr, ff, tr, tf;
    char promo = 0;  // 'q','r','b','n' or 0
};

inline std::string mv_uci(const Mv& m) {
    std::string s;
    s += static_cast<char>('a' + m.ff);
    s += static_cast<char>('1' + m.fr);
    s += static_cast<char>('a' + m.tf);
    s += static_cast<char>('1' + m.tr);
    if (m.promo) s += m.promo;
    return s;
}

inline Pos parse(const std::string& fen) {
    Pos p{};
    for (auto& row : p.board)
        for (auto& c : row) c = '.';
    size_t i = 0;
    int rank = 7, file = 0;
    while (i < fen.size() && fen[i] != ' ') {
        char c = fen[i++];
        if (c == '/') {
            --rank;
            file = 0;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            file += c - '0';
        } else {
            p.board[rank][file++] = c;
        }
    }
    ++i;
    p.white_to_move = fen[i] == 'w';
    i += 2;
    while (i < fen.size() && fen[i] != ' ') {
        switch (fen[i]) {
            case 'K': p.castle_wk = true; break;
            case 'Q': p.castle_wq = true; break;
            case 'k': p.castle_bk = true; break;
            case 'q': p.castle_bq = true; break;
        }
        ++i;
    }
    ++i;
    if (i < fen.size() && fen[i] != '-') {
        p.ep_file = fen[i] - 'a';
        p.ep_rank = fen[i + 1] - '1';
    }
    return p;
}

inline bool white_piece(char c) { return c != '.' && std::isupper(static_cast<unsigned char>(c)); }
inline bool black_piece(char c) { return c != '.' && std::islower(static_cast<unsigned char>(c)); }

// Castle generation needs attack probes which themselves enumerate pseudo
// moves; probes pass include_castling=false (a castle can never capture).
inline void gen_pseudo(const Pos& p, std::vector<Mv>& out, bool include_castling = true);

inline Pos make(const Pos& p, const Mv& m) {
    Pos n = p;
    char piece = n.board[m.fr][m.ff];
    char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(piece)));
    n.board[m.fr][m.ff] = '.';
    // en passant removal
    if (lower == 'p' && m.tf != m.ff && p.board[m.tr][m.tf] == '.') n.board[m.fr][m.tf] = '.';
    n.board[m.tr][m.tf] = m.promo ? (p.white_to_move
                                         ? static_cast<char>(std::toupper(
                                               static_cast<unsigned char>(m.promo)))
                                         : m.promo)
                                  : piece;
    // castling rook hop
    if (lower == 'k' && m.ff == 4 && (m.tf == 6 || m.tf == 2)) {
        if (m.tf == 6) {
            n.board[m.fr][5] = n.board[m.fr][7];
            n.board[m.fr][7] = '.';
        } else {
            n.board[m.fr][3] = n.board[m.fr][0];
            n.board[m.fr][0] = '.';
        }
    }
    auto touched = [&](int r, int f) {
        if (r == 0 && f == 4) n.castle_wk = n.castle_wq = false;
        if (r == 0 && f == 0) n.castle_wq = false;
        if (r == 0 && f == 7) n.castle_wk = false;
        if (r == 7 && f == 4) n.castle_bk = n.castle_bq = false;
        if (r == 7 && f == 0) n.castle_bq = false;
        if (r == 7 && f == 7) n.castle_bk = false;
    };
    touched(m.fr, m.ff);
    touched(m.tr, m.tf);
    n.ep_rank = n.ep_file = -1;
    if (lower == 'p' && (m.tr - m.fr == 2 || m.fr - m.tr == 2)) {
        n.ep_rank = (m.fr + m.tr) / 2;
        n.ep_file = m.ff;
    }
    n.white_to_move = !p.white_to_move;
    return n;
}

// Is `sq` (of the side `defender_white`) attackable right now by the mover?
// Probes by dropping a dummy defender pawn on the square.
inline bool square_attacked(const Pos& p, int rank, int file, bool defender_white) {
    Pos probe = p;
    probe.white_to_move = !defender_white;
    if (probe.board[rank][file] == '.') probe.board[rank][file] = defender_white ? 'P' : 'p';
    std::vector<Mv> moves;
    gen_pseudo(probe, moves, false);
    for (const auto& m : moves)
        if (m.tr == rank && m.tf == file) return true;
    return false;
}

inline bool king_capturable(const Pos& p) {
    // side to move can capture the opponent king?
    char target = p.white_to_move ? 'k' : 'K';
    std::vector<Mv> moves;
    gen_pseudo(p, moves, false);
    for (const auto& m : moves)
        if (p.board[m.tr][m.tf] == target) return true;
    return false;
}

inline void gen_pseudo(const Pos& p, std::vector<Mv>& out, bool include_castling) {
    bool white = p.white_to_move;
    auto mine = white ? white_piece : black_piece;
    auto theirs = white ? black_piece : white_piece;
    auto push = [&](int fr, int ff, int tr, int tf) {
        char piece = std::tolower(static_cast<unsigned char>(p.board[fr][ff]));
        if (piece == 'p' && (tr == 7 || tr == 0)) {
            for (char promo : {'q', 'r', 'b', 'n'}) out.push_back({fr, ff, tr, tf, promo});
        } else {
            out.push_back({fr, ff, tr, tf, 0});
        }
    };
    for (int r = 0; r < 8; ++r)
        for (int f = 0; f < 8; ++f) {
            char c = p.board[r][f];
            if (!mine(c)) continue;
            switch (std::tolower(static_cast<unsigned char>(c))) {
                case 'p': {
                    int d = white ? 1 : -1;
                    int start = white ? 1 : 6;
                    if (r + d >= 0 && r + d < 8 && p.board[r + d][f] == '.') {
                        push(r, f, r + d, f);
                        if (r == start && p.board[r + 2 * d][f] == '.') push(r, f, r + 2 * d, f);
                    }
                    for (int df : {-1, 1}) {
                        int tf = f + df, tr = r + d;
                        if (tf < 0 || tf > 7 || tr < 0 || tr > 7) continue;
                        if (theirs(p.board[tr][tf])) push(r, f, tr, tf);
                        else if (tr == p.ep_rank && tf == p.ep_file) push(r, f, tr, tf);
                    }
                    break;
                }
                case 'n':
                    for (auto [dr, df] : {std::pair{2, 1}, {2, -1}, {-2, 1}, {-2, -1},
                                          {1, 2}, {1, -2}, {-1, 2}, {-1, -2}}) {
                        int tr = r + dr, tf = f + df;
                        if (tr < 0 || tr > 7 || tf < 0 || tf > 7) continue;
                        if (!mine(p.board[tr][tf])) push(r, f, tr, tf);
                    }
                    break;
                case 'k':
                    for (int dr = -1; dr <= 1; ++dr)
                        for (int df = -1; df <= 1; ++df) {
                            if (!dr && !df) continue;
                            int tr = r + dr, tf = f + df;
                            if (tr < 0 || tr > 7 || tf < 0 || tf > 7) continue;
                            if (!mine(p.board[tr][tf])) push(r, f, tr, tf);
                        }
                    break;
                case 'b':
                case 'r':
                case 'q': {
                    char t = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
                    std::vector<std::pair<int, int>> dirs;
                    if (t != 'r') dirs.insert(dirs.end(), {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}});
                    if (t != 'b') dirs.insert(dirs.end(), {{1, 0}, {-1, 0}, {0, 1}, {0, -1}});
                    for (auto [dr, df] : dirs) {
                        int tr = r + dr, tf = f + df;
                        while (tr >= 0 && tr < 8 && tf >= 0 && tf < 8) {
                            if (mine(p.board[tr][tf])) break;
                            push(r, f, tr, tf);
                            if (theirs(p.board[tr][tf])) break;
                            tr += dr;
                            tf += df;
                        }
                    }
                    break;
                }
            }
        }
    // castling
    if (!include_castling) return;
    int home = white ? 0 : 7;
    char king = white ? 'K' : 'k';
    if (p.board[home][4] == king && !square_attacked(p, home, 4, white)) {
        bool ks = white ? p.castle_wk : p.castle_bk;
        bool qs = white ? p.castle_wq : p.castle_bq;
        char rook = white ? 'R' : 'r';
        if (ks && p.board[home][7] == rook && p.board[home][5] == '.' && p.board[home][6] == '.' &&
            !square_attacked(p, home, 5, white))
            out.push_back({home, 4, home, 6, 0});
        if (qs && p.board[home][0] == rook && p.board[home][1] == '.' && p.board[home][2] == '.' &&
            p.board[home][3] == '.' && !square_attacked(p, home, 3, white))
            out.push_back({home, 4, home, 2, 0});
    }
}

inline std::vector<Mv> legal_moves(const Pos& p) {
    std::vector<Mv> pseudo, legal;
    gen_pseudo(p, pseudo);
    for (const auto& m : pseudo) {
        // Castling through check is handled at generation; here only the
        // resulting king safety matters.
        Pos n = make(p, m);
        if (!king_capturable(n)) legal.push_back(m);
    }
    return legal;
}

inline std::uint64_t perft(const Pos& p, int depth) {
    if (depth <= 0) return 1;
    std::uint64_t nodes = 0;
    for (const auto& m : legal_moves(p)) {
        if (depth == 1) ++nodes;
        else nodes += perft(make(p, m), depth - 1);
    }
    return nodes;
}

inline std::string to_fen_core(const Pos& p) {
    // placement + side only; enough for cross-checks on piece placement
    std::string out;
    for (int r = 7; r >= 0; --r) {
        int empty = 0;
        for (int f = 0; f < 8; ++f) {
            if (p.board[r][f] == '.') {
                ++empty;
                continue;
            }
            if (empty) out += static_cast<char>('0' + empty);
            empty = 0;
            out += p.board[r][f];
        }
        if (empty) out += static_cast<char>('0' + empty);
        if (r) out += '/';
    }
    out += p.white_to_move ? " w" : " b";
    return out;
}

}  // namespace chess_ref
