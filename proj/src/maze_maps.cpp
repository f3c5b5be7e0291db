#include "hra/maze.hpp"

// Kept in sync with maps/map_[a-d].txt (checked by the maze tests).

namespace hra {

const std::array<std::string_view, 4>& bundled_map_texts() {
  static const std::array<std::string_view, 4> texts = {
    R"MAP(#####################
#o........#........o#
#.###.###.#.###.###.#
#...................#
#.###.#.#####.#.###.#
#.....#...#...#.....#
#####.###   ###.#####
#.........GG........#
#.###.#.#####.#.###.#
#...#.....P.....#...#
###.#.#.#####.#.#.###
#.....#...#...#.....#
#.#######.F.#######.#
#...................#
#####################
)MAP",
    R"MAP(#####################
#.........#.........#
#.##.####.#.####.##.#
#o..................#
#.##.#.###.###.#.##.#
#....#...#.#...#....#
####.###.....###.####
#.......#GGG#.......#
#.#####.#####.#####.#
#.........P........o#
#.###.#.#####.#.###.#
#...#.#...F...#.#...#
###.#.###.#.###.#.###
#.........#.........#
#####################
)MAP",
    R"MAP(#####################
#o.......#.#.......o#
#.#####.##.##.#####.#
#...................#
#.###.#.#####.#.###.#
#.#...#...#...#...#.#
#.#.#####   #####.#.#
#.....#..GG...#.....#
###.#.#.#####.#.#.###
#...#.....P.....#...#
#.#####.#####.#####.#
#.........F.........#
#.###.#.#####.#.###.#
#.....#.......#.....#
#####################
)MAP",
    R"MAP(#####################
#.........#.........#
#.#.#####.#.#####.#.#
#.#.......o.......#.#
#.#.###.#####.###.#.#
#.......#...#.......#
###.###.#GGG#.###.###
#.........#.........#
#.#####.#####.#####.#
#....#....P....#....#
####.#.#######.#.####
#o.....#..F..#......#
#.####.#.###.#.####.#
#...................#
#####################
)MAP",
  };
  return texts;
}

}  // namespace hra
