#ifndef ASEP_VERSION_HPP
#define ASEP_VERSION_HPP

#define ASEP_VERSION "0.1.0"

#endif
